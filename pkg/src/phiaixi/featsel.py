"""Reward frequency statistics, D-sharp decision rules and RF-BDD selection."""
from __future__ import annotations

import csv
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .bdd import Bdd, informative_mask, informative_vars_table, reduce_table
from .core import ConfigError, bits_to_int

D_EPS = 1e-6


class RewardStats:
    """Counts n(r, s, a) with states as bit tuples and rewards as ids."""

    def __init__(self):
        self.counts: Counter = Counter()
        self.reward_totals: Counter = Counter()
        self.cell_totals: Counter = Counter()
        self.total = 0

    def update(self, s, a: int, r: int) -> "RewardStats":
        s = tuple(s)
        self.counts[(r, s, a)] += 1
        self.reward_totals[r] += 1
        self.cell_totals[(s, a)] += 1
        self.total += 1
        return self

    def p_cond(self, r: int, s, a: int) -> float:
        n = self.cell_totals.get((tuple(s), a), 0)
        return self.counts.get((r, tuple(s), a), 0) / n if n else 0.0

    def ratio(self, r: int, s, a: int) -> float:
        """p(r|s,a) / p(r^c|s,a); 0 for unseen cells, inf for a zero denominator."""
        s = tuple(s)
        n = self.cell_totals.get((s, a), 0)
        hit = self.counts.get((r, s, a), 0)
        if n == 0 or hit == 0:
            return 0.0
        if hit == n:
            return math.inf
        return hit / (n - hit)

    @property
    def rewards(self) -> list[int]:
        return sorted(self.reward_totals)


def update_stats(stats: RewardStats, s, a: int, r: int) -> RewardStats:
    return stats.update(s, a, r)


def sharpness_floor(stats: RewardStats, r: int) -> tuple[float, bool]:
    """Returns (p(r)/p(r^c), unpredictable-flag) from marginal frequencies."""
    if stats.total == 0:
        raise ConfigError("no observations")
    hit = stats.reward_totals.get(r, 0)
    if hit == 0:
        return 0.0, True
    if hit == stats.total:
        return math.inf, False
    return hit / (stats.total - hit), False


def choose_threshold(floor: float, multiplier: float) -> float:
    return max(multiplier * floor, D_EPS)


@dataclass
class DecisionRule:
    reward: int
    threshold: float
    state_bits: int
    action_bits: int
    table: np.ndarray

    @property
    def num_vars(self) -> int:
        return self.state_bits + self.action_bits

    def __call__(self, s, a: int) -> int:
        return int(self.table[(bits_to_int(s) << self.action_bits) | a])

    def table_string(self) -> str:
        return "".join(str(int(b)) for b in self.table)

    def bdd(self) -> Bdd:
        return reduce_table(self.table)

    def informative_predicates(self) -> set[int]:
        """Predicate positions kept by reduction; action bits are never reported."""
        return {v for v in informative_vars_table(self.table) if v < self.state_bits}


def _wilson(hits, totals, z):
    n = np.where(totals > 0, totals, 1.0)
    p = hits / n
    z2 = z * z
    centre = p + z2 / (2 * n)
    spread = z * np.sqrt(np.maximum(p * (1 - p) / n + z2 / (4 * n * n), 0.0))
    return (centre - spread) / (1 + z2 / n), (centre + spread) / (1 + z2 / n)


def sharp_cells(hits: np.ndarray, totals: np.ndarray, threshold: float, z: float = 0.0,
                with_known: bool = False):
    """Vectorised decision for count arrays.

    With ``z = 0`` this is the plain frequency rule hits/(n - hits) > D with
    unseen cells mapping to 0. A positive ``z`` replaces the frequency by its
    Wilson lower confidence bound before comparing, which suppresses cells
    whose apparent sharpness is explained by sampling noise.

    ``with_known`` also returns a mask of cells whose verdict is settled:
    seen, and (for ``z > 0``) with the whole confidence interval on one side.
    """
    hits = np.asarray(hits, dtype=np.float64)
    totals = np.asarray(totals, dtype=np.float64)
    seen = totals > 0
    if z <= 0.0:
        if math.isinf(threshold):
            value = np.zeros(hits.shape, dtype=np.uint8)
        else:
            value = (seen & (hits > threshold * (totals - hits))).astype(np.uint8)
        return (value, seen) if with_known else value
    p_star = 1.0 if math.isinf(threshold) else threshold / (1.0 + threshold)
    lower, upper = _wilson(hits, totals, z)
    value = (seen & (lower > p_star)).astype(np.uint8)
    if not with_known:
        return value
    return value, seen & ((lower > p_star) | (upper <= p_star))


def build_rule(stats: RewardStats, r: int, D: float, state_bits: int, num_actions: int,
               z: float = 0.0) -> DecisionRule:
    """Truth table over (state bits ++ action bits) for reward ``r``."""
    floor, _ = sharpness_floor(stats, r)
    if not D > floor and not math.isinf(floor):
        raise ConfigError(f"threshold {D} must exceed the sharpness floor {floor}")
    action_bits = max(1, math.ceil(math.log2(num_actions))) if num_actions > 1 else 1
    size = 1 << (state_bits + action_bits)
    hits = np.zeros(size)
    totals = np.zeros(size)
    for (rr, s, a), c in stats.counts.items():
        idx = (bits_to_int(s) << action_bits) | a
        totals[idx] += c
        if rr == r:
            hits[idx] += c
    return DecisionRule(r, D, state_bits, action_bits, sharp_cells(hits, totals, D, z))


# ---------------------------------------------------------------------------
# RF-BDD


@dataclass
class RfBddConfig:
    num_subsets: int = 500
    subset_size: int = 8
    threshold: float = 0.9
    d_multiplier: float = 2.0
    # 0 gives the plain frequency rule; see sharp_cells
    confidence_z: float = 2.5
    unsettled_as_dont_care: bool = True


@dataclass
class SelectionData:
    """Pool bit matrix X[t, j] = predicate j on the state preceding step t."""

    X: np.ndarray
    actions: np.ndarray
    rewards: np.ndarray
    num_actions: int

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=np.uint8)
        self.actions = np.asarray(self.actions, dtype=np.int64)
        self.rewards = np.asarray(self.rewards, dtype=np.int64)
        if not (len(self.X) == len(self.actions) == len(self.rewards)):
            raise ValueError("X, actions and rewards must have equal length")

    @property
    def action_bits(self) -> int:
        return max(1, math.ceil(math.log2(self.num_actions))) if self.num_actions > 1 else 1

    def stats_for(self, subset) -> RewardStats:
        st = RewardStats()
        cols = self.X[:, list(subset)]
        for row, a, r in zip(cols.tolist(), self.actions.tolist(), self.rewards.tolist()):
            st.update(tuple(row), a, r)
        return st


@dataclass
class RfBddReport:
    pool_size: int
    rewards: list[int]
    votes: dict[int, np.ndarray] = field(default_factory=dict)
    selections: dict[int, np.ndarray] = field(default_factory=dict)
    floors: dict[int, float] = field(default_factory=dict)
    unpredictable: list[int] = field(default_factory=list)
    threshold: float = 0.9
    diagnostic: str = ""

    def retention(self, r: int) -> np.ndarray:
        sel = self.selections[r]
        return np.divide(self.votes[r], sel, out=np.zeros(self.pool_size), where=sel > 0)

    def kept_for(self, r: int) -> list[int]:
        return [int(j) for j in np.flatnonzero((self.selections[r] > 0) & (self.retention(r) >= self.threshold))]

    @property
    def selected(self) -> list[int]:
        out: set[int] = set()
        for r in self.rewards:
            out.update(self.kept_for(r))
        return sorted(out)

    def best_rows(self):
        """Per predicate: (votes, selections, retention, kept, reward) for the reward with top retention."""
        kept = set(self.selected)
        rows = []
        for j in range(self.pool_size):
            best = None
            for r in self.rewards:
                ret = self.retention(r)[j]
                if best is None or ret > best[2]:
                    best = (int(self.votes[r][j]), int(self.selections[r][j]), float(ret), r)
            if best is None:
                rows.append((j, 0, 0, 0.0, False, ""))
            else:
                rows.append((j, best[0], best[1], best[2], j in kept, best[3]))
        return rows

    def write_csv(self, path, predicate_ids=None) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["predicate_id", "votes", "selections", "retention", "kept", "reward"])
            for j, v, s, ret, kept, r in self.best_rows():
                pid = predicate_ids[j] if predicate_ids is not None else j
                w.writerow([pid, v, s, f"{ret:.6f}", int(kept), r])


def rule_tables(data: SelectionData, subset, reward_ids, thresholds, z: float = 0.0,
                with_known: bool = False):
    """Decision-rule truth tables, one row per reward, for one predicate subset."""
    m = len(subset)
    ab = data.action_bits
    weights = (1 << np.arange(m - 1, -1, -1, dtype=np.int64))
    cells = (data.X[:, subset].astype(np.int64) @ weights << ab) | data.actions
    size = 1 << (m + ab)
    totals = np.bincount(cells, minlength=size)
    out = np.empty((len(reward_ids), size), dtype=np.uint8)
    known = np.empty((len(reward_ids), size), dtype=bool)
    for i, (r, D) in enumerate(zip(reward_ids, thresholds)):
        hits = np.bincount(cells[data.rewards == r], minlength=size)
        out[i], known[i] = sharp_cells(hits, totals, D, z, with_known=True)
    return (out, known) if with_known else out


def rf_bdd(data: SelectionData, config: RfBddConfig, rng: np.random.Generator,
           rewards=None) -> RfBddReport:
    """Random-subspace BDD reduction with retention voting."""
    pool = data.X.shape[1]
    if config.num_subsets < 1:
        raise ConfigError("num_subsets must be at least 1")
    if not 1 <= config.subset_size <= pool:
        raise ConfigError("subset size must lie in [1, pool size]")
    n = len(data.rewards)
    observed = sorted(set(data.rewards.tolist()))
    targets = list(observed if rewards is None else rewards)
    report = RfBddReport(pool, targets, threshold=config.threshold)
    if n == 0:
        report.rewards = []
        report.diagnostic = "no rewards observed"
        return report
    m = config.subset_size
    reward_counts = Counter(data.rewards.tolist())
    for r in targets:
        hit = reward_counts.get(r, 0)
        if hit == 0:
            floor = 0.0
            report.unpredictable.append(r)
        elif hit == n:
            floor = math.inf
        else:
            floor = hit / (n - hit)
        report.floors[r] = floor
        D = choose_threshold(floor, config.d_multiplier)
        votes = np.zeros(pool, dtype=np.int64)
        sel = np.zeros(pool, dtype=np.int64)
        for _ in range(config.num_subsets):
            subset = rng.choice(pool, size=m, replace=False)
            table, known = rule_tables(data, subset, [r], [D], config.confidence_z, with_known=True)
            keep = informative_mask(table, known if config.unsettled_as_dont_care else None)[0, :m]
            sel[subset] += 1
            votes[subset[keep]] += 1
        report.votes[r] = votes
        report.selections[r] = sel
    return report


def frequency_importance(data: SelectionData) -> np.ndarray:
    """Baseline score: largest absolute reward-mean gap between a predicate's two values."""
    scores = np.zeros(data.X.shape[1])
    y = data.rewards.astype(np.float64)
    for j in range(data.X.shape[1]):
        col = data.X[:, j].astype(bool)
        if col.all() or not col.any():
            continue
        scores[j] = abs(y[col].mean() - y[~col].mean())
    return scores
