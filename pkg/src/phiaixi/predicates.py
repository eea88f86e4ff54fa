"""Predicate combinators over histories and per-domain predicate pools.

A predicate is a base feature (a real-valued function of the history prefix)
composed with a test that maps the feature value to a bit. Every feature
offers two evaluation routes that must agree:

* ``value(h, t)``: the value on the first ``t`` steps, incremental when ``t``
  advances one step at a time (the acting-phase path);
* ``series(h)``: all values for prefixes ``0..len(h)`` at once, vectorised
  (the feature-selection path).

Window features divide by ``min(N, t)`` during warm-up and indicators return
0 until their window exists.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .core import BitString, ConfigError, History, SymbolSpace

MASK64 = (1 << 64) - 1


# ---------------------------------------------------------------------------
# hashing for the uninformative random predicates


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def splitmix64_np(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.uint64)
    with np.errstate(over="ignore"):
        x = x + np.uint64(0x9E3779B97F4A7C15)
        x = (x ^ (x >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        x = (x ^ (x >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return x ^ (x >> np.uint64(31))


def random_bit(seed: int, pid: int, t: int) -> int:
    return splitmix64(splitmix64(splitmix64(seed & MASK64) ^ pid) ^ t) & 1


# ---------------------------------------------------------------------------
# tests applied to feature values


def encode_bucket(x: float, value_range: tuple[float, float], bits: int) -> BitString:
    """Bucket number of ``x`` among 2**bits equal buckets, clipped to the range."""
    if bits < 1:
        raise ConfigError("bucket bits must be at least 1")
    idx = bucket_index(x, value_range, bits)
    return tuple((idx >> (bits - 1 - i)) & 1 for i in range(bits))


def bucket_index(x, value_range, bits: int):
    lo, hi = value_range
    n = 1 << bits
    if np.ndim(x) == 0:
        x = float(x)
        if math.isnan(x):
            return 0
        x = min(max(x, lo), hi)
        return min(int(math.floor((x - lo) / (hi - lo) * n)), n - 1)
    x = np.nan_to_num(np.asarray(x, dtype=np.float64), nan=lo)
    x = np.clip(x, lo, hi)
    return np.minimum(np.floor((x - lo) / (hi - lo) * n).astype(np.int64), n - 1)


class Test:
    """A map from feature values to {0, 1}; works on scalars and arrays."""

    name = "test"

    def __call__(self, x):
        raise NotImplementedError

    def params(self) -> dict:
        return {}


class Ge(Test):
    name = "ge"

    def __init__(self, p: float):
        self.p = p

    def __call__(self, x):
        return (np.asarray(x) >= self.p).astype(np.uint8) if np.ndim(x) else int(x >= self.p)

    def params(self):
        return {"p": self.p}


class Eq(Test):
    name = "eq"

    def __init__(self, v: float):
        self.v = v

    def __call__(self, x):
        return (np.asarray(x) == self.v).astype(np.uint8) if np.ndim(x) else int(x == self.v)

    def params(self):
        return {"v": self.v}


class IsMultiple(Test):
    name = "is_multiple"

    def __init__(self, j: int):
        self.j = j

    def __call__(self, x):
        if np.ndim(x):
            return (np.asarray(x, dtype=np.int64) % self.j == 0).astype(np.uint8)
        return int(int(x) % self.j == 0)

    def params(self):
        return {"j": self.j}


class EncodeBit(Test):
    """Bit ``i`` (1 = most significant) of the ``bits``-bit bucket code, compared to 1."""

    name = "encode_bit"

    def __init__(self, value_range: tuple[float, float], bits: int, i: int):
        if not 1 <= i <= bits:
            raise ConfigError("bit index out of range")
        self.value_range = tuple(value_range)
        self.bits = bits
        self.i = i

    def __call__(self, x):
        idx = bucket_index(x, self.value_range, self.bits)
        shift = self.bits - self.i
        if np.ndim(idx):
            return ((idx >> shift) & 1).astype(np.uint8)
        return (idx >> shift) & 1

    def params(self):
        return {"range": list(self.value_range), "bits": self.bits, "i": self.i}


def compose(f: Callable, g: Callable) -> Callable:
    """Reverse composition: apply ``f`` first, then ``g``."""
    return lambda x: g(f(x))


# ---------------------------------------------------------------------------
# features


def _arrays(h: History) -> tuple[np.ndarray, np.ndarray]:
    key = ("_arrays", len(h))
    got = h.cache.get("_arrays")
    if got is not None and got[0] == key:
        return got[1]
    out = (np.asarray(h.actions, dtype=np.int64), np.asarray(h.rewards, dtype=np.float64))
    h.cache["_arrays"] = (key, out)
    return out


class Feature:
    """Base class; subclasses set ``name`` and implement series and value."""

    name = "feature"
    stateful = False

    def params(self) -> dict:
        return {}

    @property
    def key(self) -> tuple:
        return (self.name, json.dumps(self.params(), sort_keys=True))

    def series(self, h: History) -> np.ndarray:
        ck = ("series",) + self.key
        got = h.cache.get(ck)
        if got is not None and got[0] == len(h):
            return got[1]
        arr = self._series(h)
        h.cache[ck] = (len(h), arr)
        return arr

    def value(self, h: History, t: int | None = None) -> float:
        t = len(h) if t is None else t
        return self._value(h, t)

    def _series(self, h: History) -> np.ndarray:
        return np.array([self._value(h, t) for t in range(len(h) + 1)], dtype=np.float64)

    def _value(self, h: History, t: int) -> float:
        return float(self.series(h)[t])


class Count(Feature):
    name = "count"

    def _series(self, h):
        return np.arange(len(h) + 1, dtype=np.float64)

    def _value(self, h, t):
        return float(t)


class _WindowSum(Feature):
    """Running sum of a per-step quantity over the last N steps, kept incrementally."""

    N = 1

    def _item(self, h: History, i: int) -> float:
        raise NotImplementedError

    def _items(self, h: History) -> np.ndarray:
        return np.array([self._item(h, i) for i in range(len(h))], dtype=np.float64)

    def _window_sum(self, h, t):
        ck = ("win",) + self.key
        st = h.cache.get(ck)
        N = self.N
        if st is not None and st[0] == t:
            return st[1]
        if st is not None and st[0] == t - 1:
            s = st[1] + self._item(h, t - 1)
            if t - 1 - N >= 0:
                s -= self._item(h, t - 1 - N)
        else:
            s = float(sum(self._item(h, i) for i in range(max(0, t - N), t)))
        h.cache[ck] = (t, s)
        return s

    def _window_series(self, h):
        c = np.concatenate([[0.0], np.cumsum(self._items(h))])
        t = np.arange(len(h) + 1)
        return c - c[np.maximum(t - self.N, 0)], np.minimum(t, self.N)


class PercentAction(_WindowSum):
    name = "percent_action"

    def __init__(self, a: int, N: int):
        self.a, self.N = a, N

    def params(self):
        return {"a": self.a, "N": self.N}

    def _item(self, h, i):
        return 1.0 if h.actions[i] == self.a else 0.0

    def _items(self, h):
        return (_arrays(h)[0] == self.a).astype(np.float64)

    def _value(self, h, t):
        return self._window_sum(h, t) / min(self.N, t) if t else 0.0

    def _series(self, h):
        s, d = self._window_series(h)
        return np.divide(s, d, out=np.zeros_like(s), where=d > 0)


class PercentObservation(_WindowSum):
    name = "percent_obs"

    def __init__(self, o: int, N: int):
        self.o, self.N = o, N

    def params(self):
        return {"o": self.o, "N": self.N}

    def _item(self, h, i):
        return 1.0 if h.observations[i] == self.o else 0.0

    def _value(self, h, t):
        return self._window_sum(h, t) / min(self.N, t) if t else 0.0

    def _series(self, h):
        s, d = self._window_series(h)
        return np.divide(s, d, out=np.zeros_like(s), where=d > 0)


class MAReward(_WindowSum):
    name = "ma_reward"

    def __init__(self, w: int):
        self.N = w

    def params(self):
        return {"w": self.N}

    def _item(self, h, i):
        return float(h.rewards[i])

    def _items(self, h):
        return _arrays(h)[1]

    def _value(self, h, t):
        return self._window_sum(h, t) / min(self.N, t) if t else 0.0

    def _series(self, h):
        s, d = self._window_series(h)
        return np.divide(s, d, out=np.zeros_like(s), where=d > 0)


def rate_of_change(a, b):
    """a / b, with 0/0 = 1 and x/0 = sign(x) * inf."""
    if np.ndim(a) == 0 and np.ndim(b) == 0:
        if b == 0:
            return 1.0 if a == 0 else math.copysign(math.inf, a)
        return a / b
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    out = np.where(a == 0, 1.0, np.copysign(np.inf, a))
    np.divide(a, b, out=out, where=b != 0)
    return out


class MARewardRatio(Feature):
    name = "ma_reward_ratio"

    def __init__(self, w1: int, w2: int):
        self.f1, self.f2 = MAReward(w1), MAReward(w2)

    def params(self):
        return {"w1": self.f1.N, "w2": self.f2.N}

    def _value(self, h, t):
        return rate_of_change(self.f1.value(h, t), self.f2.value(h, t))

    def _series(self, h):
        return rate_of_change(self.f1.series(h), self.f2.series(h))


class ActionSequence(Feature):
    name = "action_sequence"

    def __init__(self, seq: Sequence[int]):
        self.seq = tuple(int(a) for a in seq)

    def params(self):
        return {"seq": list(self.seq)}

    def _value(self, h, t):
        k = len(self.seq)
        return 1.0 if t >= k and tuple(h.actions[t - k:t]) == self.seq else 0.0

    def _series(self, h):
        acts = _arrays(h)[0]
        n, k = len(acts), len(self.seq)
        out = np.zeros(n + 1)
        if n >= k:
            match = np.ones(n - k + 1, dtype=bool)
            for j, a in enumerate(self.seq):
                match &= acts[j:n - k + 1 + j] == a
            out[k:] = match
        return out


class IsRockAndLose(Feature):
    """The opponent's last move was rock and the agent lost that round."""

    name = "is_rock_and_lose"

    def _value(self, h, t):
        return 1.0 if t and h.observations[t - 1] == 0 and h.rewards[t - 1] == -1 else 0.0

    def _series(self, h):
        obs = np.asarray(h.observations)
        rew = _arrays(h)[1]
        return np.concatenate([[0.0], ((obs == 0) & (rew == -1)).astype(np.float64)])


@dataclass(frozen=True)
class StepEncoder:
    """Binary code of one (action, observation, reward) step, action bits first."""

    action_bits: int
    obs_space: SymbolSpace
    reward_space: SymbolSpace
    obs_id: Callable[[Any], int] = int

    @property
    def width(self) -> int:
        return self.action_bits + self.obs_space.bit_width + self.reward_space.bit_width

    def encode(self, a, o, r) -> list[int]:
        code = (a << self.obs_space.bit_width) | self.obs_id(o)
        code = (code << self.reward_space.bit_width) | self.reward_space.index_of(r)
        return [(code >> (self.width - 1 - i)) & 1 for i in range(self.width)]


class SuffixBit(Feature):
    """The N-th bit from the end of the binary history string (N = 1 is the last bit)."""

    name = "suffix_bit"

    def __init__(self, N: int, encoder: StepEncoder):
        if N < 1:
            raise ConfigError("suffix index starts at 1")
        self.N = N
        self.encoder = encoder

    def params(self):
        return {"N": self.N}

    def _locate(self, t):
        W = self.encoder.width
        j = t - 1 - (self.N - 1) // W
        return j, W - 1 - (self.N - 1) % W

    def _value(self, h, t):
        j, pos = self._locate(t)
        if j < 0:
            return 0.0
        return float(self.encoder.encode(h.actions[j], h.observations[j], h.rewards[j])[pos])

    def _series(self, h):
        ck = ("step_bits", self.encoder.width)
        got = h.cache.get(ck)
        if got is None or got[0] != len(h):
            bits = np.array([self.encoder.encode(a, o, r) for a, o, r in h], dtype=np.float64).reshape(
                len(h), self.encoder.width)
            h.cache[ck] = got = (len(h), bits)
        bits = got[1]
        t = np.arange(len(h) + 1)
        W = self.encoder.width
        j = t - 1 - (self.N - 1) // W
        pos = W - 1 - (self.N - 1) % W
        out = np.zeros(len(h) + 1)
        ok = j >= 0
        out[ok] = bits[j[ok], pos]
        return out


class RandomBitFeature(Feature):
    """Uninformative Bernoulli(1/2) bit keyed by (seed, predicate id, t)."""

    name = "random_bit"

    def __init__(self, seed: int, pid: int):
        self.seed, self.pid = seed, pid

    def params(self):
        return {"seed": self.seed, "pid": self.pid}

    def _value(self, h, t):
        return float(random_bit(self.seed, self.pid, t))

    def _series(self, h):
        base = splitmix64(splitmix64(self.seed & MASK64) ^ self.pid)
        t = np.arange(len(h) + 1, dtype=np.uint64)
        return (splitmix64_np(np.uint64(base) ^ t) & np.uint64(1)).astype(np.float64)


# epidemic features ---------------------------------------------------------

POS, UNK = 1, 2


class NaiveInfectionRate(Feature):
    """(observed positives + c * unknowns) / |nu| on the latest observation."""

    name = "naive_infection_rate"

    def __init__(self, subset: str, nodes: np.ndarray, c: float = 0.5):
        self.subset = subset
        self.nodes = np.asarray(nodes, dtype=np.int64)
        self.c = c

    def params(self):
        return {"subset": self.subset, "c": self.c}

    def rate_of(self, obs) -> float:
        sym = obs.symbols[self.nodes]
        return (int((sym == POS).sum()) + self.c * int((sym == UNK).sum())) / len(self.nodes)

    def _value(self, h, t):
        return self.rate_of(h.observations[t - 1]) if t else 0.0

    def _series(self, h):
        out = np.zeros(len(h) + 1)
        if len(h):
            sym = np.stack([o.symbols[self.nodes] for o in h.observations])
            out[1:] = ((sym == POS).sum(1) + self.c * (sym == UNK).sum(1)) / len(self.nodes)
        return out


class InfectionRateOfChange(Feature):
    """Naive rate at the latest step minus the rate one step earlier (0 across resets)."""

    name = "infection_rate_change"

    def __init__(self, subset: str, nodes: np.ndarray, c: float = 0.5):
        self.rate = NaiveInfectionRate(subset, nodes, c)

    def params(self):
        return self.rate.params()

    def _value(self, h, t):
        if t < 2 or h.observations[t - 1].new_episode:
            return 0.0
        return self.rate.rate_of(h.observations[t - 1]) - self.rate.rate_of(h.observations[t - 2])

    def _series(self, h):
        r = self.rate.series(h)
        out = np.zeros(len(h) + 1)
        if len(h) >= 2:
            out[2:] = r[2:] - r[1:-1]
            fresh = np.array([o.new_episode for o in h.observations], dtype=bool)
            out[1:][fresh] = 0.0
        return out


class ParticleInfRate(Feature):
    """Expected infection rate under a particle-filter belief with parameters theta."""

    name = "particle_inf_rate"
    stateful = True

    def __init__(self, variant: str, net, params, num_particles: int = 100, seed: int = 0):
        self.variant = variant
        self.net = net
        self.theta = params
        self.M = num_particles
        self.seed = seed

    def params(self):
        return {"variant": self.variant, "M": self.M, "seed": self.seed}

    def _state(self, h):
        from .envs.particle import ParticleBelief

        ck = ("pf",) + self.key
        st = h.cache.get(ck)
        if st is None:
            belief = ParticleBelief(self.net, self.theta, self.M, seed=self.seed)
            st = h.cache[ck] = {"belief": belief, "values": [belief.infection_rate()]}
        return st

    def _advance(self, h, t):
        st = self._state(h)
        vals, belief = st["values"], st["belief"]
        while len(vals) <= t:
            i = len(vals) - 1
            obs = h.observations[i]
            if obs.new_episode:
                belief.reset()
                vals.append(belief.infection_rate())
            else:
                vals.append(belief.update(h.actions[i], obs.symbols))
        return vals

    def _value(self, h, t):
        return self._advance(h, t)[t]

    def _series(self, h):
        return np.asarray(self._advance(h, len(h))[: len(h) + 1], dtype=np.float64)


# ---------------------------------------------------------------------------
# predicates and abstractions


@dataclass
class Predicate:
    id: int
    kind: str
    feature: Feature
    test: Test
    family: int = 0

    def __call__(self, h: History, t: int | None = None) -> int:
        return int(self.test(self.feature.value(h, t)))

    def series(self, h: History) -> np.ndarray:
        return np.asarray(self.test(self.feature.series(h)), dtype=np.uint8)

    def params(self) -> dict:
        return {"feature": self.feature.name, **self.feature.params(), "test": self.test.name, **self.test.params()}


@dataclass
class Abstraction:
    """Ordered predicate list; bit j of the abstract state is predicate j."""

    predicates: list[Predicate] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.predicates)

    @property
    def state_bit_width(self) -> int:
        return len(self.predicates)

    def state(self, h: History, t: int | None = None) -> BitString:
        return tuple(p(h, t) for p in self.predicates)

    def series(self, h: History) -> np.ndarray:
        if not self.predicates:
            return np.zeros((len(h) + 1, 0), dtype=np.uint8)
        return pool_matrix(self.predicates, h)


def abstract_state(phi: Abstraction, h: History) -> BitString:
    return phi.state(h)


def pool_matrix(pool: Sequence[Predicate], h: History) -> np.ndarray:
    """(len(h) + 1, |pool|) bit matrix; shared features are evaluated once."""
    out = np.zeros((len(h) + 1, len(pool)), dtype=np.uint8)
    cache: dict = {}
    for j, p in enumerate(pool):
        k = p.feature.key
        if k not in cache:
            cache[k] = p.feature.series(h)
        out[:, j] = p.test(cache[k])
    return out


def write_manifest(pool: Sequence[Predicate], path) -> None:
    with open(path, "w") as fh:
        fh.write("id\tfamily\tkind\tparams\n")
        for p in pool:
            fh.write(f"{p.id}\t{p.family}\t{p.kind}\t{json.dumps(p.params(), sort_keys=True)}\n")


# ---------------------------------------------------------------------------
# pool generation


@dataclass
class PoolConfig:
    seed: int = 0
    size: int = 1000
    suffix_steps: int = 10
    naive_c: float = 0.5
    particles: int = 100
    # epidemic grids (counts match the published pool when left at defaults)
    percent_windows: tuple = (5, 10, 20, 50, 100, 200, 500, 1000, 2000)
    ma_pairs: tuple = ((5, 10), (5, 20), (10, 20), (10, 50), (20, 50), (20, 100), (50, 100), (100, 200))
    sampled_triples: int = 501
    rate_range: tuple = (0.0, 1.0)
    change_range: tuple = (-0.2, 0.2)
    change_bits: int = 8
    jackpot_multiples: tuple = tuple(range(2, 31))
    heist_windows: tuple = (1, 2, 3, 5, 8, 10, 15, 20, 30, 50)
    heist_levels: tuple = (0.05, 0.1, 0.2, 0.3, 0.4, 0.5)


class _Builder:
    def __init__(self, config: PoolConfig):
        self.config = config
        self.pool: list[Predicate] = []

    def add(self, kind, feature, test, family=0):
        self.pool.append(Predicate(len(self.pool), kind, feature, test, family))

    def fill_random(self, family=0):
        while len(self.pool) < self.config.size:
            pid = len(self.pool)
            self.add("random_bit", RandomBitFeature(self.config.seed, pid), Eq(1), family)


def step_encoder(env) -> StepEncoder:
    ab = max(1, math.ceil(math.log2(env.num_actions)))
    return StepEncoder(ab, env.observation_space, env.reward_space, env.observation_id)


def generate_pool(env_id: str, env=None, config: PoolConfig | None = None) -> list[Predicate]:
    """Deterministic predicate pool for an environment id."""
    config = config or PoolConfig()
    if env is None:
        from .envs import make_env

        env = make_env(env_id, seed=config.seed)
    b = _Builder(config)
    if env_id == "rps":
        b.add("is_rock_and_lose", IsRockAndLose(), Eq(1), 1)
        enc = step_encoder(env)
        for N in range(1, config.suffix_steps * enc.width + 1):
            b.add("suffix", SuffixBit(N, enc), Eq(1), 2)
        b.fill_random()
    elif env_id == "taxi":
        enc = step_encoder(env)
        for N in range(1, config.suffix_steps * enc.width + 1):
            b.add("suffix", SuffixBit(N, enc), Eq(1), 2)
        b.fill_random()
    elif env_id == "jackpot":
        for j in config.jackpot_multiples:
            b.add("count_is_multiple", Count(), IsMultiple(j), 1)
        b.fill_random()
    elif env_id == "stopheist":
        for o in (0, 1):
            for n in config.heist_windows:
                for p in config.heist_levels:
                    b.add("percent_obs", PercentObservation(o, n), Ge(p), 1)
        b.fill_random()
    elif env_id in ("switching", "constant"):
        enc = step_encoder(env)
        for N in range(1, config.suffix_steps * enc.width + 1):
            b.add("suffix", SuffixBit(N, enc), Eq(1), 2)
        b.fill_random()
    elif env_id == "epidemic":
        _epidemic_pool(b, env, config)
    else:
        raise ConfigError(f"no predicate pool for environment {env_id!r}")
    return b.pool


def epidemic_variants(params) -> dict:
    """Model parameter variants theta handed to the particle-filter predicates."""
    from dataclasses import replace

    return {
        "true": params,
        "low_beta": replace(params, beta=params.beta * 0.5),
        "high_beta": replace(params, beta=min(1.0, params.beta * 1.5)),
        "slow_recovery": replace(params, gamma=params.gamma * 0.5),
    }


def _epidemic_pool(b: _Builder, env, config: PoolConfig) -> None:
    net = env.net
    subsets = [(f"betweenness_{20 * i}_{20 * i + 20}", nodes) for i, nodes in enumerate(net.between_bands)]
    subsets += [(f"degree_{20 * i}_{20 * i + 20}", nodes) for i, nodes in enumerate(net.degree_bands)]
    # (1) naive infection rate, 11 subsets x 5 bits
    for name, nodes in subsets + [("all", np.arange(net.n))]:
        f = NaiveInfectionRate(name, nodes, config.naive_c)
        for i in range(1, 6):
            b.add("naive_infection_rate", f, EncodeBit(config.rate_range, 5, i), 1)
    # (2) infection rate of change, 10 band subsets x 8 bits
    for name, nodes in subsets:
        f = InfectionRateOfChange(name, nodes, config.naive_c)
        for i in range(1, config.change_bits + 1):
            b.add("infection_rate_change", f, EncodeBit(config.change_range, config.change_bits, i), 2)
    # (3) percent action, 11 actions x 9 windows x bits 1..7 of an 8-bit code
    for a in range(env.num_actions):
        for N in config.percent_windows:
            f = PercentAction(a, N)
            for i in range(1, 8):
                b.add("percent_action", f, EncodeBit((0.0, 1.0), 8, i), 3)
    # (4) action sequence indicators: every k=1 and k=2 sequence, a sample of k=3
    A = range(env.num_actions)
    for seq in itertools.chain(((a,) for a in A), itertools.product(A, A)):
        b.add("action_sequence", ActionSequence(seq), Eq(1), 4)
    triples = list(itertools.product(A, A, A))
    rng = np.random.default_rng(config.seed)
    for idx in sorted(rng.choice(len(triples), size=min(config.sampled_triples, len(triples)), replace=False)):
        b.add("action_sequence", ActionSequence(triples[idx]), Eq(1), 4)
    # (5) moving-average reward ratios
    for w1, w2 in config.ma_pairs:
        b.add("ma_reward_ratio", MARewardRatio(w1, w2), Ge(1.0), 5)
    # (6) particle-filter infection rate, 4 model variants x 5 bits
    for k, (variant, theta) in enumerate(epidemic_variants(env.params).items()):
        f = ParticleInfRate(variant, net, theta, config.particles, seed=config.seed * 7919 + k)
        for i in range(1, 6):
            b.add("particle_inf_rate", f, EncodeBit(config.rate_range, 5, i), 6)


PREDICATE_FAMILIES = {1: "(1)", 2: "(2)", 3: "(3)", 4: "(4)", 5: "(5)", 6: "(6)"}
