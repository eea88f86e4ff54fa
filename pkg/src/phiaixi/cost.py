"""Code lengths of abstract state and reward sequences (in bits).

Rewards at step t are paired with the transition (s_{t-1}, a_t, s_t) that
produced them; the state before the first step is the all-zeros state.
"""
from __future__ import annotations

import csv
import math
from collections import Counter
from dataclasses import dataclass
from typing import Hashable, Sequence

import numpy as np


def _row_cost(counts) -> float:
    """n * H(counts / n) in bits for one row of counts."""
    n = sum(counts)
    if n == 0:
        return 0.0
    return n * math.log2(n) - sum(c * math.log2(c) for c in counts if c > 0)


class TransitionCounts:
    """n(s, a, s') and n(s, a, s', r) with cached row sums."""

    def __init__(self):
        self.sas: Counter = Counter()
        self.sasr: Counter = Counter()
        self.row: Counter = Counter()
        self.n = 0

    def add(self, s: Hashable, a: Hashable, s2: Hashable, r: Hashable) -> None:
        self.sas[(s, a, s2)] += 1
        self.sasr[(s, a, s2, r)] += 1
        self.row[(s, a)] += 1
        self.n += 1

    @classmethod
    def from_sequences(cls, states: Sequence, actions: Sequence, rewards: Sequence,
                       initial_state: Hashable = None) -> "TransitionCounts":
        if not (len(states) == len(actions) == len(rewards)):
            raise ValueError("states, actions and rewards must have equal length")
        tc = cls()
        prev = initial_state
        if prev is None and len(states):
            first = states[0]
            prev = tuple(0 for _ in first) if isinstance(first, tuple) else 0
        for s, a, r in zip(states, actions, rewards):
            tc.add(prev, a, s, r)
            prev = s
        return tc

    def merge(self, other: "TransitionCounts") -> "TransitionCounts":
        out = TransitionCounts()
        for src in (self, other):
            out.sas.update(src.sas)
            out.sasr.update(src.sasr)
            out.row.update(src.row)
            out.n += src.n
        return out


def cl_state_sequence(tc: TransitionCounts) -> float:
    rows: dict = {}
    for (s, a, _), c in tc.sas.items():
        rows.setdefault((s, a), []).append(c)
    return sum(_row_cost(v) for v in rows.values())


def cl_reward_sequence(tc: TransitionCounts) -> float:
    cells: dict = {}
    for (s, a, s2, _), c in tc.sasr.items():
        cells.setdefault((s, a, s2), []).append(c)
    return sum(_row_cost(v) for v in cells.values())


def cl_phi(num_predicates: int, pool_size: int) -> float:
    """Index coding of each kept predicate."""
    if num_predicates == 0:
        return 0.0
    return num_predicates * math.log2(max(pool_size, 2))


@dataclass(frozen=True)
class CostBreakdown:
    cl_state: float
    cl_reward: float
    cl_phi: float
    n: int

    @property
    def total(self) -> float:
        return self.cl_state + self.cl_reward + self.cl_phi

    @property
    def total_without_state(self) -> float:
        return self.cl_reward + self.cl_phi

    def per_step(self) -> tuple[float, float]:
        """(Cost_M / n, Cost_M0 / n)."""
        return self.total / self.n, self.total_without_state / self.n


def cost_breakdown(states, actions, rewards, num_predicates: int, pool_size: int,
                   initial_state=None) -> CostBreakdown:
    if len(states) == 0:
        raise ValueError("trajectory must be nonempty")
    tc = TransitionCounts.from_sequences(states, actions, rewards, initial_state)
    return CostBreakdown(cl_state_sequence(tc), cl_reward_sequence(tc), cl_phi(num_predicates, pool_size), tc.n)


def abstract_trajectory(history, abstraction):
    """Per step t: (phi(h_{1:t}), a_t, r_t)."""
    series = abstraction.series(history)
    states = [tuple(int(b) for b in row) for row in series[1:]]
    return states, list(history.actions), list(history.rewards)


def cost_m(history, abstraction, pool_size: int) -> CostBreakdown:
    """Cost_M of a history under an abstraction; use ``total``."""
    s, a, r = abstract_trajectory(history, abstraction)
    return cost_breakdown(s, a, r, len(abstraction), pool_size)


def cost_m0(history, abstraction, pool_size: int) -> CostBreakdown:
    """Same breakdown; Cost_M0 is ``total_without_state``."""
    return cost_m(history, abstraction, pool_size)


def prediction_error_diagnostic(model_probs, true_probs) -> np.ndarray:
    """Running sum of squared differences between model and true predictions.

    Rows are per-step distributions over rewards; 1-d inputs are taken to be
    the probabilities of the realised reward.
    """
    m = np.asarray(model_probs, dtype=np.float64)
    t = np.asarray(true_probs, dtype=np.float64)
    if m.shape != t.shape:
        raise ValueError("shape mismatch")
    sq = (m - t) ** 2
    if sq.ndim == 2:
        sq = sq.sum(axis=1)
    return np.cumsum(sq)


def write_cost_curve(path, rows) -> None:
    """rows: iterable of (n, cost_m_per_step, cost_m0_per_step)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "cost_m_per_step", "cost_m0_per_step"])
        for n, a, b in rows:
            w.writerow([n, f"{a:.6f}", f"{b:.6f}"])


def switching_demo(n: int, seed: int = 0) -> dict[str, CostBreakdown]:
    """Costs of the flip-indicator and constant abstractions on the switching environment."""
    from .envs.simple import SwitchingEnv

    env = SwitchingEnv(seed=seed)
    prev = env.reset()
    flips, rewards = [], []
    for _ in range(n):
        p = env.step(0)
        flips.append((int(p.observation != prev),))
        rewards.append(p.reward)
        prev = p.observation
    actions = [0] * n
    return {
        "phi0": cost_breakdown(flips, actions, rewards, num_predicates=1, pool_size=2),
        "phi1": cost_breakdown([()] * n, actions, rewards, num_predicates=0, pool_size=2),
    }
