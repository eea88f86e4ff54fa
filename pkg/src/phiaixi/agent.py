"""The collect -> select -> act agent lifecycle and its evaluation loop."""
from __future__ import annotations

import math
import pickle
from dataclasses import dataclass, field

import numpy as np

from .core import BitString, ConfigError, ContractError, History, bits_to_int, int_to_bits
from .ctw import PhiBctwModel
from .featsel import RfBddConfig, RfBddReport, SelectionData, rf_bdd
from .planner import PlannerConfig, RhoUct
from .predicates import Abstraction, PoolConfig, generate_pool, pool_matrix

COLLECTING, ACTING = "collecting", "acting"
# distinct seed streams so the agent never shares draws with an environment seeded alike
AGENT_STREAM, SELECTION_STREAM, PLANNER_STREAM, BASELINE_STREAM = 1, 2, 3, 4


@dataclass
class ExplorationConfig:
    epsilon0: float = 1.0
    alpha: float = 0.999
    floor: float = 0.03

    def validate(self) -> None:
        if not 0.0 < self.floor < 1.0:
            raise ConfigError("exploration floor must lie in (0, 1)")
        if not 0.0 < self.alpha <= 1.0:
            raise ConfigError("exploration decay must lie in (0, 1]")
        if not 0.0 <= self.epsilon0 <= 1.0:
            raise ConfigError("initial exploration must lie in [0, 1]")


@dataclass
class AgentConfig:
    collection_steps: int = 1000
    max_state_bits: int = 8
    seed: int = 0
    pool: PoolConfig = field(default_factory=PoolConfig)
    rfbdd: RfBddConfig = field(default_factory=RfBddConfig)
    planner: PlannerConfig = field(default_factory=PlannerConfig)
    exploration: ExplorationConfig = field(default_factory=ExplorationConfig)

    def validate(self) -> None:
        if self.collection_steps < 1:
            raise ConfigError("collection_steps must be at least 1")
        if self.max_state_bits < 0:
            raise ConfigError("max_state_bits must be nonnegative")
        self.exploration.validate()
        self.planner.validate()


def exploration_rate(t: int, config: ExplorationConfig) -> float:
    if t < 0:
        raise ValueError("t must be nonnegative")
    return max(config.epsilon0 * config.alpha ** t, config.floor)


def selection_data(X: np.ndarray, history: History, reward_space, num_actions: int) -> SelectionData:
    """Rows pair the state before step t (prefix t - 1) with a_t and r_t."""
    rewards = np.array([reward_space.index_of(r) for r in history.rewards], dtype=np.int64)
    return SelectionData(X[:-1], np.asarray(history.actions, dtype=np.int64), rewards, num_actions)


def choose_predicates(report: RfBddReport, cap: int) -> list[int]:
    """Selected pool indices, trimmed to the ``cap`` best by retention, then votes."""
    chosen = list(report.selected)
    if len(chosen) <= cap:
        return chosen
    score = {}
    for r in report.rewards:
        ret, votes = report.retention(r), report.votes[r]
        for j in chosen:
            score[j] = max(score.get(j, (0.0, 0)), (float(ret[j]), int(votes[j])))
    ranked = sorted(chosen, key=lambda j: (-score[j][0], -score[j][1], j))
    return sorted(ranked[:cap])


class Agent:
    """Uniform-random collection, one RF-BDD selection, then rho-UCT over Phi-BCTW."""

    def __init__(self, env, config: AgentConfig | None = None, pool=None):
        self.config = config or AgentConfig()
        self.config.validate()
        self.env_id = env.env_id
        self.num_actions = env.num_actions
        self.action_bits = max(1, math.ceil(math.log2(self.num_actions)))
        self.reward_space = env.reward_space
        self.reward_bits = env.reward_space.bit_width
        lo, hi = env.reward_bounds
        self.reward_range = (lo, hi) if hi > lo else (lo, lo + 1.0)
        self.pool = pool if pool is not None else generate_pool(env.env_id, env, self.config.pool)
        self.rng = np.random.default_rng([self.config.seed, AGENT_STREAM])
        self.history = History()
        self.phase = COLLECTING
        self.report: RfBddReport | None = None
        self.selected: list[int] = []
        self.abstraction: Abstraction | None = None
        self.model: PhiBctwModel | None = None
        self.planner: RhoUct | None = None
        self.prev_state: BitString = ()
        self.acting_steps = 0
        self._last_action: int | None = None
        self._started = False

    # lifecycle --------------------------------------------------------------

    def start(self, observation=None) -> int:
        """Begin interaction after an environment reset; returns the first action."""
        self._started = True
        return self._choose()

    def step(self, percept) -> int:
        """Record the percept for the last action, then pick the next action."""
        if not self._started:
            raise ContractError("percept received before start()")
        self.observe(self._last_action, percept.observation, percept.reward)
        return self._choose()

    def observe(self, action: int, observation, reward: float) -> None:
        self.history.append(action, observation, reward)
        if self.phase == ACTING:
            s = self.abstraction.state(self.history)
            self._update_model(action, s, reward)
        elif len(self.history) >= self.config.collection_steps:
            self.select()

    def _update_model(self, action, s, reward) -> None:
        r_bits = int_to_bits(self.reward_space.index_of(reward), self.reward_bits)
        self.model.update(self.prev_state, int_to_bits(action, self.action_bits), tuple(s) + r_bits)
        self.prev_state = tuple(s)

    # selection --------------------------------------------------------------

    def select(self) -> RfBddReport:
        """Run RF-BDD on the collected history, fix phi and replay the history into the model."""
        h = self.history
        X = pool_matrix(self.pool, h)
        data = selection_data(X, h, self.reward_space, self.num_actions)
        sel_rng = np.random.default_rng([self.config.seed, SELECTION_STREAM])
        self.report = rf_bdd(data, self.config.rfbdd, sel_rng)
        self.selected = choose_predicates(self.report, self.config.max_state_bits)
        phi = Abstraction([self.pool[j] for j in self.selected])
        self.install(phi)
        states = X[:, self.selected]
        for t in range(1, len(h) + 1):
            self._update_model(h.actions[t - 1], tuple(int(b) for b in states[t]), h.rewards[t - 1])
        return self.report

    def install(self, abstraction: Abstraction, model=None) -> None:
        """Fix the abstraction and start acting; ``model`` may be a plug-in generative model."""
        if self.abstraction is not None:
            raise ContractError("abstraction is fixed once selected")
        self.abstraction = abstraction
        k = len(abstraction)
        self.model = model if model is not None else PhiBctwModel(k, self.action_bits, self.reward_bits)
        self.prev_state = (0,) * k
        self.planner = RhoUct(self.model, self.num_actions, self.action_bits, self.decode_reward, self._planner_config())
        self.phase = ACTING

    def _planner_config(self) -> PlannerConfig:
        pc = self.config.planner
        return PlannerConfig(pc.horizon, pc.simulations, pc.exploration, self.config.seed * 1_000_003 + PLANNER_STREAM,
                             tuple(self.reward_range), pc.trace_path)

    def decode_reward(self, bits) -> float:
        idx = min(bits_to_int(bits), self.reward_space.cardinality - 1)
        return self.reward_space.value_of(idx)

    # acting -----------------------------------------------------------------

    def _random_action(self) -> int:
        return int(self.rng.integers(self.num_actions))

    def _choose(self) -> int:
        if self.phase == COLLECTING:
            a = self._random_action()
        else:
            eps = exploration_rate(self.acting_steps, self.config.exploration)
            self.acting_steps += 1
            if self.rng.random() < eps:
                a = self._random_action()
            else:
                a = self.planner.search(self.prev_state)
        self._last_action = a
        return a

    # checkpoints ------------------------------------------------------------

    def __getstate__(self):
        d = self.__dict__.copy()
        d["pool"] = None
        d["abstraction"] = None
        if self.planner is not None:
            d["planner_nodes"] = self.planner.nodes
            d["planner_rng"] = self.planner.rng.getstate()
        d["planner"] = None
        d["model"] = self.model.to_bytes() if isinstance(self.model, PhiBctwModel) else self.model
        return d

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            pickle.dump(self, fh)

    @classmethod
    def load(cls, path, env) -> "Agent":
        with open(path, "rb") as fh:
            agent = pickle.load(fh)
        return agent.reattach(env)

    def reattach(self, env) -> "Agent":
        """Rebuild the pool, model and planner dropped by pickling."""
        self.pool = generate_pool(env.env_id, env, self.config.pool)
        if isinstance(self.model, bytes):
            self.model = PhiBctwModel.from_bytes(self.model)
        if self.phase == ACTING:
            self.abstraction = Abstraction([self.pool[j] for j in self.selected])
            self.planner = RhoUct(self.model, self.num_actions, self.action_bits, self.decode_reward,
                                  self._planner_config())
            self.planner.nodes = self.__dict__.pop("planner_nodes")
            self.planner.rng.setstate(self.__dict__.pop("planner_rng"))
        return self


# ---------------------------------------------------------------------------
# evaluation


def moving_average(x, window: int) -> np.ndarray:
    """Trailing means over full windows; length len(x) - window + 1 (empty if shorter)."""
    x = np.asarray(x, dtype=np.float64)
    if window < 1:
        raise ValueError("window must be at least 1")
    if len(x) < window:
        return np.zeros(0)
    c = np.concatenate([[0.0], np.cumsum(x)])
    return (c[window:] - c[:-window]) / window


@dataclass
class RunLog:
    rewards: np.ndarray
    actions: np.ndarray
    episodes: list[dict]
    agent: Agent | None = None

    def reward_curve(self, window: int = 5000) -> np.ndarray:
        return moving_average(self.rewards, window)

    def action_curves(self, num_actions: int, window: int = 500) -> np.ndarray:
        """(num_actions, steps - window + 1) moving percentages of each action."""
        return np.stack([moving_average(self.actions == a, window) for a in range(num_actions)])

    def episode_returns(self) -> np.ndarray:
        return np.array([e["return"] for e in self.episodes], dtype=np.float64)


def run(policy, env, steps: int) -> RunLog:
    """Drive ``policy`` (start(obs) / step(percept)) for ``steps`` cycles."""
    obs = env.reset()
    a = policy.start(obs)
    rewards = np.zeros(steps)
    actions = np.zeros(steps, dtype=np.int64)
    episodes: list[dict] = []
    ep_return, ep_len = 0.0, 0
    for t in range(steps):
        p = env.step(a)
        rewards[t], actions[t] = p.reward, a
        ep_return += p.reward
        ep_len += 1
        if p.done:
            episodes.append({"end": t + 1, "return": p.info.get("episode_return", ep_return), "length": ep_len,
                             "terminated": bool(p.info.get("terminated", p.info.get("success", True)))})
            ep_return, ep_len = 0.0, 0
        if t + 1 < steps:
            a = policy.step(p)
        elif hasattr(policy, "observe"):
            policy.observe(a, p.observation, p.reward)
    return RunLog(rewards, actions, episodes, policy if isinstance(policy, Agent) else None)


def evaluate(agent, env, steps: int) -> RunLog:
    return run(agent, env, steps)


class RandomPolicy:
    def __init__(self, num_actions: int, seed: int = 0):
        self.num_actions = num_actions
        self.rng = np.random.default_rng([seed, BASELINE_STREAM])

    def start(self, observation=None) -> int:
        return int(self.rng.integers(self.num_actions))

    def step(self, percept) -> int:
        return int(self.rng.integers(self.num_actions))


class ConstantPolicy:
    def __init__(self, action: int):
        self.action = action

    def start(self, observation=None) -> int:
        return self.action

    def step(self, percept) -> int:
        return self.action
