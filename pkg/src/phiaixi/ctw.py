"""KT estimators, context tree weighting and the chained per-bit Phi-BCTW model.

All probabilities are kept as natural logs. A context tree consumes its
context from the last bit toward older bits: the child at depth 1 is chosen
by ``context[-1]``, the child at depth 2 by ``context[-2]`` and so on.
"""
from __future__ import annotations

import math
import struct
from typing import Sequence

from .core import BitString, ContractError

LN_HALF = math.log(0.5)


def log_mix_half(a: float, b: float) -> float:
    """log(0.5*exp(a) + 0.5*exp(b)) without overflow."""
    if a > b:
        return a + math.log1p(math.exp(b - a)) + LN_HALF
    return b + math.log1p(math.exp(a - b)) + LN_HALF


def kt_predict(zeros: int, ones: int, bit: int) -> float:
    """KT predictive probability of ``bit`` after the given counts."""
    return ((ones if bit else zeros) + 0.5) / (zeros + ones + 1)


def kt_log_block(bits: Sequence[int]) -> float:
    """Log KT block probability of a bit string built by sequential updates."""
    zeros = ones = 0
    lp = 0.0
    for b in bits:
        lp += math.log(kt_predict(zeros, ones, b))
        if b:
            ones += 1
        else:
            zeros += 1
    return lp


class KtCounts:
    """Stand-alone KT estimator (the per-node statistic of a context tree)."""

    __slots__ = ("zeros", "ones", "log_block_prob")

    def __init__(self, zeros: int = 0, ones: int = 0, log_block_prob: float = 0.0):
        self.zeros = zeros
        self.ones = ones
        self.log_block_prob = log_block_prob

    def predict(self, bit: int) -> float:
        return kt_predict(self.zeros, self.ones, bit)

    def update(self, bit: int) -> None:
        self.log_block_prob += math.log(self.predict(bit))
        if bit:
            self.ones += 1
        else:
            self.zeros += 1


class CtNode:
    __slots__ = ("zeros", "ones", "log_kt", "log_w", "c0", "c1")

    def __init__(self):
        self.zeros = 0
        self.ones = 0
        self.log_kt = 0.0
        self.log_w = 0.0
        self.c0 = None
        self.c1 = None


class ContextTree:
    """A depth-D weighted context tree with sparse node allocation.

    ``journal`` is an optional list; when set, every mutation appends an
    undo record so that a caller can roll the tree back exactly.
    """

    def __init__(self, depth: int):
        if depth < 0:
            raise ContractError("depth must be nonnegative")
        self.depth = depth
        self.root = CtNode()
        self.journal: list | None = None

    @property
    def log_prob(self) -> float:
        """Log weighted block probability of every bit seen so far."""
        return self.root.log_w

    def _check(self, context) -> None:
        if len(context) < self.depth:
            raise ContractError(f"context of length {len(context)} shorter than depth {self.depth}")

    def update(self, context: Sequence[int], bit: int) -> float:
        """Absorb ``bit`` under ``context``; returns its log predictive probability."""
        self._check(context)
        depth = self.depth
        journal = self.journal
        node = self.root
        path = [node]
        n = len(context)
        for i in range(depth):
            if context[n - 1 - i]:
                child = node.c1
                if child is None:
                    child = node.c1 = CtNode()
                    if journal is not None:
                        journal.append((node, 1))
            else:
                child = node.c0
                if child is None:
                    child = node.c0 = CtNode()
                    if journal is not None:
                        journal.append((node, 0))
            node = child
            path.append(node)
        before = self.root.log_w
        for i in range(depth, -1, -1):
            node = path[i]
            if journal is not None:
                journal.append((node, node.zeros, node.ones, node.log_kt, node.log_w))
            if bit:
                node.log_kt += math.log((node.ones + 0.5) / (node.zeros + node.ones + 1))
                node.ones += 1
            else:
                node.log_kt += math.log((node.zeros + 0.5) / (node.zeros + node.ones + 1))
                node.zeros += 1
            if i == depth:
                node.log_w = node.log_kt
            else:
                c0, c1 = node.c0, node.c1
                w = (c0.log_w if c0 is not None else 0.0) + (c1.log_w if c1 is not None else 0.0)
                node.log_w = log_mix_half(node.log_kt, w)
        return self.root.log_w - before

    def log_predict(self, context: Sequence[int], bit: int) -> float:
        """Log predictive probability of ``bit``; the tree is not modified."""
        self._check(context)
        depth = self.depth
        node = self.root
        path = [node]
        n = len(context)
        for i in range(depth):
            node = (node.c1 if context[n - 1 - i] else node.c0) if node is not None else None
            path.append(node)
        # bottom-up recomputation of log_w along the path with the new bit
        w_new = 0.0
        for i in range(depth, -1, -1):
            node = path[i]
            if node is None:
                kt = math.log(0.5)
                if i == depth:
                    w_new = kt
                else:
                    w_new = log_mix_half(kt, w_new)
                continue
            z, o = node.zeros, node.ones
            kt = node.log_kt + math.log(((o if bit else z) + 0.5) / (z + o + 1))
            if i == depth:
                w_new = kt
            else:
                went = context[n - 1 - i]
                sib = node.c0 if went else node.c1
                w_new = log_mix_half(kt, w_new + (sib.log_w if sib is not None else 0.0))
        return w_new - self.root.log_w

    def predict(self, context: Sequence[int], bit: int) -> float:
        return math.exp(self.log_predict(context, bit))

    def prob_one(self, context: Sequence[int]) -> float:
        """P(next bit = 1) in probability space; agrees with predict to rounding.

        Each node mixes its own KT prediction with its child's using the
        posterior weight of stopping there, w = Pkt / (2 Pw). An absent
        subtree predicts 1/2.
        """
        self._check(context)
        node = self.root
        n = len(context)
        path = []
        for i in range(self.depth):
            path.append(node)
            node = node.c1 if context[n - 1 - i] else node.c0
            if node is None:
                break
        if node is None:
            p = 0.5
        else:
            p = (node.ones + 0.5) / (node.zeros + node.ones + 1)
        exp = math.exp
        for node in reversed(path):
            w = 0.5 * exp(node.log_kt - node.log_w)
            p = w * (node.ones + 0.5) / (node.zeros + node.ones + 1) + (1.0 - w) * p
        return p

    def iter_nodes(self):
        """Yields (path, node) in depth-first order; path is the branch tuple from the root."""
        stack = [((), self.root)]
        while stack:
            path, node = stack.pop()
            yield path, node
            if node.c1 is not None:
                stack.append((path + (1,), node.c1))
            if node.c0 is not None:
                stack.append((path + (0,), node.c0))

    def node_count(self) -> int:
        return sum(1 for _ in self.iter_nodes())

    def recompute_weights(self) -> None:
        """Rebuild every log_w from log_kt and children (used after loading)."""
        def rec(node, depth):
            if depth == self.depth:
                node.log_w = node.log_kt
                return node.log_w
            w = 0.0
            for c in (node.c0, node.c1):
                if c is not None:
                    w += rec(c, depth + 1)
            node.log_w = log_mix_half(node.log_kt, w) if (node.zeros + node.ones) else 0.0
            return node.log_w
        rec(self.root, 0)


def undo_journal(journal: list, mark: int) -> None:
    """Pop journal records back to ``mark``, restoring node contents."""
    while len(journal) > mark:
        rec = journal.pop()
        if len(rec) == 2:
            parent, branch = rec
            if branch:
                parent.c1 = None
            else:
                parent.c0 = None
        else:
            node, node.zeros, node.ones, node.log_kt, node.log_w = rec


class ModelSnapshot:
    __slots__ = ("mark", "prev_state", "steps", "depth")

    def __init__(self, mark, prev_state, steps, depth):
        self.mark = mark
        self.prev_state = prev_state
        self.steps = steps
        self.depth = depth


class PhiBctwModel:
    """Chained per-bit CTW model over (next state, reward) symbols.

    Bit l of the symbol (1-based) is predicted by a tree of depth d + l - 1
    whose context is the previous state's bits, the action bits and the
    first l - 1 bits of the current symbol.
    """

    CHECKPOINT_MAGIC = b"PBCTW"
    CHECKPOINT_VERSION = 1

    def __init__(self, state_bits: int, action_bits: int, reward_bits: int):
        if min(state_bits, action_bits, reward_bits) < 0 or state_bits + reward_bits < 1:
            raise ContractError("need at least one symbol bit")
        self.state_bits = state_bits
        self.action_bits = action_bits
        self.reward_bits = reward_bits
        self.d = state_bits + action_bits
        self.k = state_bits + reward_bits
        self.trees = [ContextTree(self.d + l) for l in range(self.k)]
        self.prev_state: BitString = (0,) * state_bits
        self.steps = 0
        self._journal: list = []
        self._snapshots: list[ModelSnapshot] = []
        self._bit_cache: dict = {}

    # prediction -------------------------------------------------------------

    def _check(self, prev_s, a, symbol=None) -> None:
        if len(prev_s) != self.state_bits or len(a) != self.action_bits:
            raise ContractError("context width mismatch")
        if symbol is not None and len(symbol) != self.k:
            raise ContractError(f"symbol must have {self.k} bits")

    def prob_one(self, l: int, context: tuple) -> float:
        """P(bit l = 1 | context) with a per-model cache cleared on mutation."""
        key = (l, context)
        p = self._bit_cache.get(key)
        if p is None:
            p = self._bit_cache[key] = self.trees[l].prob_one(context)
        return p

    def log_predict(self, prev_s: Sequence[int], a: Sequence[int], symbol: Sequence[int]) -> float:
        self._check(prev_s, a, symbol)
        ctx = list(prev_s) + list(a)
        lp = 0.0
        for l, bit in enumerate(symbol):
            lp += self.trees[l].log_predict(ctx, bit)
            ctx.append(bit)
        return lp

    def predict(self, prev_s, a, symbol) -> float:
        return math.exp(self.log_predict(prev_s, a, symbol))

    def sample(self, prev_s, a, rng) -> tuple[BitString, BitString]:
        """Draw (next state, reward bits); ``rng`` needs a ``random()`` method."""
        self._check(prev_s, a)
        ctx = tuple(prev_s) + tuple(a)
        for l in range(self.k):
            bit = 1 if rng.random() < self.prob_one(l, ctx) else 0
            ctx = ctx + (bit,)
        sym = ctx[self.d:]
        return sym[: self.state_bits], sym[self.state_bits:]

    # learning ---------------------------------------------------------------

    def update(self, prev_s, a, symbol) -> float:
        """Absorb one symbol; returns the log predictive probability it had."""
        self._check(prev_s, a, symbol)
        ctx = list(prev_s) + list(a)
        lp = 0.0
        for l, bit in enumerate(symbol):
            lp += self.trees[l].update(ctx, bit)
            ctx.append(bit)
        self.prev_state = tuple(symbol[: self.state_bits])
        self.steps += 1
        if self._bit_cache:
            self._bit_cache.clear()
        return lp

    @property
    def log_block_prob(self) -> float:
        """log xi(sr_{1:n} | a_{1:n}) for every symbol absorbed so far."""
        return sum(t.root.log_w for t in self.trees)

    # snapshots --------------------------------------------------------------

    def snapshot(self) -> ModelSnapshot:
        if not self._snapshots:
            for t in self.trees:
                t.journal = self._journal
        snap = ModelSnapshot(len(self._journal), self.prev_state, self.steps, len(self._snapshots))
        self._snapshots.append(snap)
        return snap

    def restore(self, snap: ModelSnapshot) -> None:
        if not self._snapshots or self._snapshots[-1] is not snap:
            raise ContractError("snapshots must be restored innermost first")
        self._snapshots.pop()
        undo_journal(self._journal, snap.mark)
        self.prev_state = snap.prev_state
        self.steps = snap.steps
        self._bit_cache.clear()
        if not self._snapshots:
            self._journal.clear()
            for t in self.trees:
                t.journal = None

    # serialisation ----------------------------------------------------------

    def to_bytes(self) -> bytes:
        out = [self.CHECKPOINT_MAGIC, struct.pack("<HHHHQ", self.CHECKPOINT_VERSION,
                                                  self.state_bits, self.action_bits, self.reward_bits, self.steps)]
        out.append(bytes(self.prev_state))
        for tree in self.trees:
            nodes = list(tree.iter_nodes())
            out.append(struct.pack("<I", len(nodes)))
            for path, node in nodes:
                out.append(struct.pack("<H", len(path)))
                out.append(bytes(path))
                out.append(struct.pack("<QQd", node.zeros, node.ones, node.log_kt))
        return b"".join(out)

    @classmethod
    def from_bytes(cls, data: bytes) -> "PhiBctwModel":
        m = len(cls.CHECKPOINT_MAGIC)
        if data[:m] != cls.CHECKPOINT_MAGIC:
            raise ValueError("not a Phi-BCTW checkpoint")
        version, sb, ab, rb, steps = struct.unpack_from("<HHHHQ", data, m)
        if version != cls.CHECKPOINT_VERSION:
            raise ValueError(f"unsupported checkpoint version {version}")
        pos = m + struct.calcsize("<HHHHQ")
        model = cls(sb, ab, rb)
        model.steps = steps
        model.prev_state = tuple(data[pos:pos + sb])
        pos += sb
        rec = struct.Struct("<QQd")
        for tree in model.trees:
            (count,) = struct.unpack_from("<I", data, pos)
            pos += 4
            for _ in range(count):
                (plen,) = struct.unpack_from("<H", data, pos)
                pos += 2
                path = data[pos:pos + plen]
                pos += plen
                zeros, ones, log_kt = rec.unpack_from(data, pos)
                pos += rec.size
                node = tree.root
                for b in path:
                    nxt = node.c1 if b else node.c0
                    if nxt is None:
                        nxt = CtNode()
                        if b:
                            node.c1 = nxt
                        else:
                            node.c0 = nxt
                    node = nxt
                node.zeros, node.ones, node.log_kt = zeros, ones, log_kt
            tree.recompute_weights()
        return model

    def state_equal(self, other: "PhiBctwModel") -> bool:
        """Deep comparison of all node statistics and the step state."""
        if (self.state_bits, self.action_bits, self.reward_bits, self.prev_state, self.steps) != (
            other.state_bits, other.action_bits, other.reward_bits, other.prev_state, other.steps
        ):
            return False
        for ta, tb in zip(self.trees, other.trees):
            na = {p: (n.zeros, n.ones, n.log_kt, n.log_w) for p, n in ta.iter_nodes()}
            nb = {p: (n.zeros, n.ones, n.log_kt, n.log_w) for p, n in tb.iter_nodes()}
            if na != nb:
                return False
        return True
