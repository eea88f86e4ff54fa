"""Ordered binary decision diagrams built from complete truth tables.

A truth table over n variables is a length 2**n sequence whose entry at
index i is f(x) where x is the n-bit binary expansion of i and variable 0
is the most significant bit (so the table starts at f(0..0) and ends at
f(1..1)). Variables are 0-based internally; reports that follow the usual
x1..xn naming add one.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

TERMINALS = (0, 1)


def _as_table(table) -> np.ndarray:
    if isinstance(table, str):
        table = [int(c) for c in table]
    arr = np.asarray(table, dtype=np.uint8).ravel()
    n = arr.size.bit_length() - 1
    if arr.size == 0 or 1 << n != arr.size:
        raise ValueError("truth table length must be a power of two")
    if arr.max(initial=0) > 1:
        raise ValueError("truth table entries must be 0 or 1")
    return arr


@dataclass
class Bdd:
    """Node 0 and 1 are the terminals; internal node i >= 2 is nodes[i - 2]."""

    num_vars: int
    nodes: list[tuple[int, int, int]] = field(default_factory=list)
    root: int = 0

    @classmethod
    def from_table(cls, table) -> "Bdd":
        """Full, unreduced decision tree of a truth table."""
        arr = _as_table(table)
        n = arr.size.bit_length() - 1
        bdd = cls(n)

        def build(var: int, lo: int, hi: int) -> int:
            if var == n:
                return int(arr[lo])
            mid = (lo + hi) // 2
            a = build(var + 1, lo, mid)
            b = build(var + 1, mid, hi)
            bdd.nodes.append((var, a, b))
            return len(bdd.nodes) + 1

        bdd.root = build(0, 0, arr.size)
        return bdd

    @property
    def internal_count(self) -> int:
        return len(self._reachable())

    def node(self, i: int) -> tuple[int, int, int]:
        return self.nodes[i - 2]

    def _reachable(self) -> list[int]:
        seen, stack = set(), [self.root]
        while stack:
            i = stack.pop()
            if i < 2 or i in seen:
                continue
            seen.add(i)
            _, lo, hi = self.node(i)
            stack.extend((lo, hi))
        return sorted(seen)

    def evaluate(self, assignment) -> int:
        i = self.root
        while i >= 2:
            var, lo, hi = self.node(i)
            i = hi if assignment[var] else lo
        return i

    def to_table(self) -> np.ndarray:
        """Evaluate on every input, vectorised over assignments."""
        n = self.num_vars
        idx = np.arange(1 << n)
        cur = np.full(idx.size, self.root, dtype=np.int64)
        nodes = np.array([(0, 0, 0), (0, 1, 1)] + list(self.nodes), dtype=np.int64).reshape(-1, 3)
        for _ in range(n):
            internal = cur >= 2
            if not internal.any():
                break
            var = nodes[cur, 0]
            bit = (idx >> (n - 1 - var)) & 1
            nxt = np.where(bit == 1, nodes[cur, 2], nodes[cur, 1])
            cur = np.where(internal, nxt, cur)
        return cur.astype(np.uint8)

    def reduce(self) -> "Bdd":
        """Canonical reduction: bypass lo == hi nodes and merge duplicates."""
        order = sorted(self._reachable(), key=lambda i: -self.node(i)[0])
        remap = {0: 0, 1: 1}
        unique: dict[tuple[int, int, int], int] = {}
        out = Bdd(self.num_vars)
        for i in order:
            var, lo, hi = self.node(i)
            lo, hi = remap[lo], remap[hi]
            if lo == hi:
                remap[i] = lo
                continue
            key = (var, lo, hi)
            j = unique.get(key)
            if j is None:
                out.nodes.append(key)
                j = unique[key] = len(out.nodes) + 1
            remap[i] = j
        out.root = remap[self.root]
        return out

    def is_reduced(self) -> bool:
        keys = [self.node(i) for i in self._reachable()]
        return all(lo != hi for _, lo, hi in keys) and len(set(keys)) == len(keys)

    def informative_vars(self) -> set[int]:
        return {self.node(i)[0] for i in self._reachable()}

    def to_dot(self, names=None) -> str:
        names = names or [f"x{v + 1}" for v in range(self.num_vars)]
        lines = ["digraph bdd {", '  t0 [shape=box,label="0"];', '  t1 [shape=box,label="1"];']

        def nid(i):
            return f"t{i}" if i < 2 else f"n{i}"

        for i in self._reachable():
            var, lo, hi = self.node(i)
            lines.append(f'  n{i} [label="{names[var]}"];')
            lines.append(f"  n{i} -> {nid(lo)} [style=dashed];")
            lines.append(f"  n{i} -> {nid(hi)};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def reduce_table(table) -> Bdd:
    """Reduced BDD straight from a truth table (hash-consing over halves)."""
    arr = _as_table(table)
    n = arr.size.bit_length() - 1
    out = Bdd(n)
    unique: dict[tuple[int, int, int], int] = {}
    # level by level from the bottom: ids of each block at the current size
    ids = arr.astype(np.int64)
    for var in range(n - 1, -1, -1):
        pairs = ids.reshape(-1, 2)
        new = np.empty(pairs.shape[0], dtype=np.int64)
        for j, (lo, hi) in enumerate(pairs.tolist()):
            if lo == hi:
                new[j] = lo
                continue
            key = (var, lo, hi)
            k = unique.get(key)
            if k is None:
                out.nodes.append(key)
                k = unique[key] = len(out.nodes) + 1
            new[j] = k
        ids = new
    out.root = int(ids[0])
    return out


def is_bead(table) -> bool:
    """True when a truth table does not repeat itself at its midpoint."""
    arr = _as_table(table)
    if arr.size == 1:
        return True
    h = arr.size // 2
    return bool((arr[:h] != arr[h:]).any())


def informative_vars_table(table) -> set[int]:
    """Variables of the reduced BDD, read off the table without building it.

    Variable i labels a reduced node iff some level-i block of the table is
    a bead, i.e. differs between its two halves.
    """
    arr = _as_table(table)
    n = arr.size.bit_length() - 1
    out = set()
    for i in range(n):
        blocks = arr.reshape(1 << i, 2, -1)
        if (blocks[:, 0, :] != blocks[:, 1, :]).any():
            out.add(i)
    return out


def informative_mask(tables: np.ndarray, care: np.ndarray | None = None) -> np.ndarray:
    """Batch form of :func:`informative_vars_table` for a (k, 2**n) array.

    With a ``care`` mask, var i counts only if two cared-for entries that
    differ in var i alone disagree, i.e. no completion of the don't-care
    entries can drop var i.
    """
    tables = np.asarray(tables, dtype=np.uint8)
    k, size = tables.shape
    n = size.bit_length() - 1
    mask = np.zeros((k, n), dtype=bool)
    for i in range(n):
        blocks = tables.reshape(k, 1 << i, 2, -1)
        differ = blocks[:, :, 0, :] != blocks[:, :, 1, :]
        if care is not None:
            c = np.asarray(care, dtype=bool).reshape(k, 1 << i, 2, -1)
            differ &= c[:, :, 0, :] & c[:, :, 1, :]
        mask[:, i] = differ.any(axis=(1, 2))
    return mask
