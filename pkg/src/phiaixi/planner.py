"""rho-UCT search over a generative model with a persistent node table.

The model only needs ``sample(prev_state, action_bits, rng) -> (state_bits,
reward_bits)``; sampling must not mutate it. Chance nodes are collapsed:
a decision node is keyed by (abstract state, steps to horizon), so a
sampled next state leads straight to the next decision node.
"""
from __future__ import annotations

import csv
import math
import random
from dataclasses import dataclass
from typing import Callable, Sequence

from .core import BitString, ConfigError, int_to_bits


@dataclass
class PlannerConfig:
    horizon: int = 5
    simulations: int = 100
    exploration: float = math.sqrt(2.0)
    seed: int = 0
    reward_range: tuple[float, float] = (0.0, 1.0)
    trace_path: str | None = None

    def validate(self) -> None:
        if self.horizon < 1:
            raise ConfigError("horizon must be at least 1")
        if self.simulations < 1:
            raise ConfigError("simulations must be at least 1")
        if not self.exploration > 0:
            raise ConfigError("exploration constant must be positive")
        lo, hi = self.reward_range
        if not hi > lo:
            raise ConfigError("reward range must have hi > lo")


class SearchNode:
    """Per-action visit counts and running-mean returns for one (state, depth) key."""

    __slots__ = ("counts", "values", "visits")

    def __init__(self, num_actions: int):
        self.counts = [0] * num_actions
        self.values = [0.0] * num_actions
        self.visits = 0

    def update(self, a: int, ret: float) -> None:
        self.visits += 1
        self.counts[a] += 1
        self.values[a] += (ret - self.values[a]) / self.counts[a]

    def greedy(self) -> int:
        best, best_v = 0, -math.inf
        for a, (c, v) in enumerate(zip(self.counts, self.values)):
            if c and v > best_v:
                best, best_v = a, v
        return best


def ucb_select(node: SearchNode, C: float, lo: float = 0.0, span: float = 1.0, rng=None) -> int:
    """Unvisited actions first (uniform among them), then the UCB argmax, lowest id on ties.

    Values are normalised as (v - lo) / span before the bonus is added.
    """
    unvisited = [a for a, c in enumerate(node.counts) if c == 0]
    if unvisited:
        if rng is None or len(unvisited) == 1:
            return unvisited[0]
        return unvisited[int(rng.random() * len(unvisited))]
    log_n = math.log(node.visits)
    best, best_score = 0, -math.inf
    for a, (c, v) in enumerate(zip(node.counts, node.values)):
        score = (v - lo) / span + C * math.sqrt(log_n / c)
        if score > best_score:
            best, best_score = a, score
    return best


class RhoUct:
    """Search driver; ``decode_reward`` maps reward bits to a real reward."""

    def __init__(self, model, num_actions: int, action_bits: int, decode_reward: Callable[[BitString], float],
                 config: PlannerConfig | None = None):
        self.config = config or PlannerConfig()
        self.config.validate()
        self.model = model
        self.num_actions = num_actions
        self.action_codes = [int_to_bits(a, action_bits) for a in range(num_actions)]
        self.decode_reward = decode_reward
        self.rng = random.Random(self.config.seed)
        self.nodes: dict[tuple, SearchNode] = {}
        self._reward_cache: dict = {}
        self._trace = None
        self._sim_index = 0

    def _reward(self, bits) -> float:
        r = self._reward_cache.get(bits)
        if r is None:
            r = self._reward_cache[bits] = float(self.decode_reward(bits))
        return r

    def node(self, s: BitString, depth: int) -> SearchNode | None:
        return self.nodes.get((tuple(s), depth))

    def search(self, s: Sequence[int], simulations: int | None = None) -> int:
        sims = self.config.simulations if simulations is None else simulations
        if sims < 1:
            raise ConfigError("simulations must be at least 1")
        s = tuple(s)
        m = self.config.horizon
        for _ in range(sims):
            self._simulate(s, m)
        return self.nodes[(s, m)].greedy()

    def _simulate(self, s: BitString, m: int) -> float:
        lo, hi = self.config.reward_range
        C = self.config.exploration
        rng, model, codes = self.rng, self.model, self.action_codes
        path = []
        rewards = []
        dleft = m
        ret_tail = 0.0
        while dleft > 0:
            key = (s, dleft)
            node = self.nodes.get(key)
            fresh = node is None
            if fresh:
                node = self.nodes[key] = SearchNode(self.num_actions)
            a = ucb_select(node, C, dleft * lo, dleft * (hi - lo), rng)
            s2, rb = model.sample(s, codes[a], rng)
            path.append((node, s, a))
            rewards.append(self._reward(rb))
            s = s2
            dleft -= 1
            if fresh:
                ret_tail = self._rollout(s, dleft)
                break
        ret = ret_tail
        for (node, _, a), r in zip(reversed(path), reversed(rewards)):
            ret += r
            node.update(a, ret)
        if self.config.trace_path:
            self._write_trace(path, ret)
        return ret

    def _rollout(self, s: BitString, dleft: int) -> float:
        total = 0.0
        rng, model, codes, n = self.rng, self.model, self.action_codes, self.num_actions
        for _ in range(dleft):
            s, rb = model.sample(s, codes[int(rng.random() * n)], rng)
            total += self._reward(rb)
        return total

    def _write_trace(self, path, ret) -> None:
        if self._trace is None:
            self._trace = open(self.config.trace_path, "w", newline="")
            self._writer = csv.writer(self._trace)
            self._writer.writerow(["simulation", "path", "return"])
        steps = ";".join("".join(map(str, s)) + f":{a}" for _, s, a in path)
        self._writer.writerow([self._sim_index, steps, f"{ret:.6f}"])
        self._sim_index += 1

    def close(self) -> None:
        if self._trace is not None:
            self._trace.close()
            self._trace = None

    def __getstate__(self):
        d = self.__dict__.copy()
        d["_trace"] = None
        d.pop("_writer", None)
        return d


def rho_uct_search(model, s, num_actions: int, action_bits: int, decode_reward, config: PlannerConfig) -> int:
    """One-shot search with a fresh node table."""
    return RhoUct(model, num_actions, action_bits, decode_reward, config).search(s)
