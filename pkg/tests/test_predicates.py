from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phiaixi.core import ConfigError, History
from phiaixi.envs import make_env
from phiaixi.envs.epidemic import NEG, POS, UNK, EpiObs
from phiaixi.predicates import (MASK64, Abstraction, ActionSequence, Count, EncodeBit, Eq, Ge, IsMultiple,
                                IsRockAndLose, MAReward, MARewardRatio, NaiveInfectionRate, PercentAction,
                                PercentObservation, Predicate, RandomBitFeature, SuffixBit, abstract_state,
                                compose, encode_bucket, generate_pool, pool_matrix, random_bit, rate_of_change,
                                splitmix64, splitmix64_np, step_encoder, write_manifest)


def history(actions, rewards=None, observations=None):
    h = History()
    rewards = rewards or [0.0] * len(actions)
    observations = observations or [0] * len(actions)
    for a, o, r in zip(actions, observations, rewards):
        h.append(a, o, r)
    return h


def test_compose_examples():
    h = history([0] * 6)
    assert compose(lambda hh: Count().value(hh), IsMultiple(3))(h) == 1
    assert compose(lambda x: x, Eq(1))(1) == 1
    h = history([0] * 10, rewards=[1.0] * 10)
    assert compose(lambda hh: MAReward(10).value(hh), Ge(0))(h) == 1


def test_encode_bucket_examples():
    assert encode_bucket(0.3, (0, 1), 2) == (0, 1)
    assert encode_bucket(1.0, (0, 1), 2) == (1, 1)
    assert encode_bucket(-5.0, (0, 1), 5) == (0,) * 5
    with pytest.raises(ConfigError):
        encode_bucket(0.3, (0, 1), 0)


def test_bit_extraction_half_spaces():
    xs = np.linspace(-0.5, 1.5, 4001)
    for k in (1, 3, 5):
        for i in range(1, k + 1):
            bits = EncodeBit((0.0, 1.0), k, i)(xs)
            # bit i flips exactly at multiples of 2**-i inside the range
            flips = np.flatnonzero(np.diff(bits.astype(int)))
            assert len(flips) == 2 ** i - 1
            for x in xs[::97]:
                assert EncodeBit((0.0, 1.0), k, i)(float(x)) == encode_bucket(x, (0.0, 1.0), k)[i - 1]


def test_feature_examples():
    h = history([0, 2, 2, 1, 2])
    assert PercentAction(2, 4).value(h) == pytest.approx(0.75)
    h = history([0, 0, 1, 3])
    assert ActionSequence((1, 3)).value(h) == 1.0
    assert ActionSequence((3, 1)).value(h) == 0.0
    sym = np.full(10, NEG, dtype=np.int8)
    sym[:2] = POS
    sym[2:5] = UNK
    h = History()
    h.append(0, EpiObs(sym, False), 0.0)
    assert NaiveInfectionRate("nu", np.arange(10), 0.5).value(h) == pytest.approx(0.35)


def test_warm_up():
    h = history([1, 1])
    assert PercentAction(1, 10).value(h) == 1.0
    assert PercentAction(1, 10).value(h, 0) == 0.0
    assert ActionSequence((1, 1, 1)).value(h) == 0.0
    assert MAReward(5).value(history([0, 0], rewards=[2.0, 4.0])) == pytest.approx(3.0)


def test_rate_of_change():
    assert rate_of_change(0.0, 0.0) == 1.0
    assert rate_of_change(2.0, 0.0) == float("inf")
    assert rate_of_change(-2.0, 0.0) == float("-inf")
    assert rate_of_change(3.0, 2.0) == 1.5
    assert rate_of_change(np.array([0.0, 1.0, 3.0]), np.array([0.0, 0.0, 2.0])).tolist() == [1.0, np.inf, 1.5]


def test_abstract_state_examples():
    assert abstract_state(Abstraction([]), history([0])) == ()
    # opponent (observation) played rock and the agent lost that round
    h = history([2], rewards=[-1.0], observations=[0])
    irl = Predicate(0, "irl", IsRockAndLose(), Eq(1))
    assert abstract_state(Abstraction([irl]), h) == (1,)
    false = Predicate(1, "f", Count(), Ge(10))
    assert abstract_state(Abstraction([false, false]), h) == (0, 0)


def test_splitmix_scalar_vector_agree():
    xs = [0, 1, 2, 12345, MASK64, 0x9E3779B97F4A7C15]
    assert splitmix64_np(np.array(xs, dtype=np.uint64)).tolist() == [splitmix64(x) for x in xs]
    bits = [random_bit(7, 3, t) for t in range(4000)]
    assert abs(np.mean(bits) - 0.5) < 0.03
    f = RandomBitFeature(7, 3)
    assert f.series(history([0] * 3999)).tolist() == bits


def test_pool_counts():
    env = make_env("epidemic", seed=0, num_nodes=100)
    pool = generate_pool("epidemic", env)
    assert len(pool) == 1489
    assert sorted(Counter(p.family for p in pool).items()) == [(1, 55), (2, 80), (3, 693), (4, 633), (5, 8), (6, 20)]
    for env_id in ("rps", "jackpot", "stopheist", "taxi"):
        assert len(generate_pool(env_id)) == 1000
    assert [p.id for p in pool] == list(range(1489))
    with pytest.raises(ConfigError):
        generate_pool("chess")


def test_pool_deterministic(tmp_path):
    a = generate_pool("rps")
    b = generate_pool("rps")
    write_manifest(a, tmp_path / "a.tsv")
    write_manifest(b, tmp_path / "b.tsv")
    assert (tmp_path / "a.tsv").read_text() == (tmp_path / "b.tsv").read_text()
    first = (tmp_path / "a.tsv").read_text().splitlines()[:2]
    assert first[0] == "id\tfamily\tkind\tparams"
    assert first[1].startswith("0\t1\tis_rock_and_lose")


def _simulate(env_id, steps, seed):
    env = make_env(env_id, seed=seed)
    env.reset()
    rng = np.random.default_rng(seed + 100)
    h = History()
    for _ in range(steps):
        a = int(rng.integers(env.num_actions))
        p = env.step(a)
        h.append(a, p.observation, p.reward)
    return env, h


@pytest.mark.parametrize("env_id", ["rps", "taxi", "jackpot", "stopheist", "epidemic"])
def test_scalar_and_vector_routes_agree(env_id):
    env, h = _simulate(env_id, 120, seed=1)
    pool = generate_pool(env_id, env)
    X = pool_matrix(pool, h)
    rng = np.random.default_rng(0)
    cols = rng.choice(len(pool), size=40, replace=False)
    fresh = History(h.actions, h.observations, h.rewards)
    for t in range(len(h) + 1):
        for j in cols:
            assert pool[j](fresh, t) == X[t, j], (pool[j].kind, t)


@pytest.mark.parametrize("env_id", ["rps", "epidemic"])
def test_prefix_local(env_id):
    env, h = _simulate(env_id, 80, seed=2)
    pool = generate_pool(env_id, env)
    short = History(h.actions[:50], h.observations[:50], h.rewards[:50])
    assert np.array_equal(pool_matrix(pool, short), pool_matrix(pool, h)[:51])


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 2), st.integers(0, 2), st.sampled_from([-1.0, 0.0, 1.0])),
                min_size=0, max_size=60),
       st.integers(1, 8))
def test_window_features_match_series(steps, N):
    h = History()
    for a, o, r in steps:
        h.append(a, o, r)
    feats = [PercentAction(1, N), PercentObservation(2, N), MAReward(N), MARewardRatio(N, N + 3),
             ActionSequence((1, 2)), IsRockAndLose()]
    for f in feats:
        series = f.series(h)
        # incremental route on a copy that grows one step at a time
        g = History()
        vals = [f.value(g)]
        for a, o, r in steps:
            g.append(a, o, r)
            vals.append(f.value(g))
        assert np.allclose(series, vals, equal_nan=True), f.name


def test_suffix_bits_match_encoding():
    env = make_env("taxi", seed=0)
    enc = step_encoder(env)
    assert enc.width == 3 + 8 + 2
    env2, h = _simulate("taxi", 5, seed=0)
    string = [b for a, o, r in h for b in enc.encode(a, o, r)]
    for N in range(1, len(string) + 3):
        want = string[-N] if N <= len(string) else 0
        assert SuffixBit(N, enc).value(h) == want
