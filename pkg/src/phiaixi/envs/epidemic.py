"""SEIRS epidemic control on a contact network (partially observed)."""
from __future__ import annotations

import json
from dataclasses import dataclass, replace

import networkx as nx
import numpy as np
import scipy.sparse as sp

from ..core import ContractError, SymbolSpace
from .base import Environment, Percept
from .graphs import betweenness_ranking, degree_ranking, make_graph, percentile_bands

S, E, I, R = 0, 1, 2, 3
NEG, POS, UNK = 0, 1, 2
NUM_ACTIONS = 11
ACTION_NAMES = ("do_nothing",) + tuple(f"vaccinate_{20 * b}_{20 * b + 20}" for b in range(5)) + tuple(
    f"quarantine_top_{20 * q}" for q in range(1, 6))


@dataclass(frozen=True)
class EpidemicParams:
    beta: float = 0.2
    sigma: float = 0.3
    gamma: float = 0.08
    rho: float = 0.1
    alpha: tuple = (0.1, 0.1, 0.8, 0.05)  # tested fraction for S, E, I, R
    mu: tuple = (0.1, 0.9, 0.9, 0.1)  # positive-test probability for S, E, I, R
    lam: float = 1.0
    eta1: float = 2.0
    eta2: float = 4.0
    vaccinate_cost: float = 0.5
    quarantine_cost: float = 1.0
    terminal_bonus: float = 2.0
    max_steps: int = 1000
    initial_infected: float = 0.01

    def __post_init__(self):
        probs = (self.beta, self.sigma, self.gamma, self.rho) + tuple(self.alpha) + tuple(self.mu)
        if any(not 0.0 <= p <= 1.0 for p in probs):
            raise ValueError("epidemic probabilities must lie in [0, 1]")

    def emission_table(self) -> np.ndarray:
        """P(symbol | label) as a (4 labels, 3 symbols) array in NEG, POS, UNK order."""
        a = np.asarray(self.alpha, dtype=np.float64)
        m = np.asarray(self.mu, dtype=np.float64)
        return np.stack([a * (1 - m), a * m, 1 - a], axis=1)


def transmission_prob(k, beta: float, immunity):
    """P(S -> E) with k infectious contacts and immunity level omega."""
    return (1.0 - (1.0 - beta) ** np.asarray(k, dtype=np.float64)) / immunity


def seirs_step(labels: np.ndarray, immunity: np.ndarray, adjacency: sp.csr_matrix,
               quarantined: np.ndarray, params: EpidemicParams, rng: np.random.Generator) -> np.ndarray:
    """One synchronous SEIRS transition; ``labels`` may be (n,) or (M, n)."""
    inf = (labels == I).astype(np.float64)
    if quarantined.any():
        inf = inf * ~quarantined
    if inf.ndim == 1:
        k = adjacency @ inf
    else:
        k = (adjacency @ inf.T).T
    if quarantined.any():
        k = k * ~quarantined
    u = rng.random(labels.shape)
    new = labels.copy()
    new[(labels == S) & (u < transmission_prob(k, params.beta, immunity))] = E
    new[(labels == E) & (u < params.sigma)] = I
    new[(labels == I) & (u < params.gamma)] = R
    new[(labels == R) & (u < params.rho)] = S
    return new


def emit_observations(labels: np.ndarray, params: EpidemicParams, rng: np.random.Generator) -> np.ndarray:
    """Per-node test symbol: POS w.p. alpha*mu, NEG w.p. alpha*(1-mu), UNK otherwise."""
    table = params.emission_table()
    cum = np.cumsum(table, axis=1)[labels]
    u = rng.random(labels.shape)[..., None]
    return (u >= cum[..., :2]).sum(axis=-1).astype(np.int8)


class ContactNetwork:
    """Graph with per-node SEIRS labels and immunity; quarantine lasts one step."""

    def __init__(self, G: nx.Graph):
        self.G = G
        self.n = G.number_of_nodes()
        if sorted(G.nodes()) != list(range(self.n)):
            raise ContractError("graph nodes must be labelled 0..n-1")
        self.adjacency = nx.to_scipy_sparse_array(G, nodelist=range(self.n), format="csr", dtype=np.float64)
        self.adjacency = sp.csr_matrix(self.adjacency)
        self.betweenness = betweenness_ranking(G)
        self.degree = degree_ranking(G)
        self.between_bands = percentile_bands(self.betweenness)
        self.degree_bands = percentile_bands(self.degree)
        self.labels = np.zeros(self.n, dtype=np.int8)
        self.immunity = np.ones(self.n)
        self.quarantined = np.zeros(self.n, dtype=bool)

    def active_edges(self) -> list[tuple[int, int]]:
        q = self.quarantined
        return [(u, v) for u, v in self.G.edges() if not (q[u] or q[v])]


def apply_action(net: ContactNetwork, action: int, params: EpidemicParams) -> float:
    """Mutates immunity / quarantine for this step; returns the action cost."""
    net.quarantined[:] = False
    if action == 0:
        return 0.0
    if 1 <= action <= 5:
        band = net.between_bands[action - 1]
        imm = net.immunity[band]
        net.immunity[band] = np.where(imm < params.eta1, params.eta1, params.eta2)
        return params.vaccinate_cost * len(band)
    if 6 <= action <= 10:
        count = round((action - 5) * 0.2 * net.n)
        top = np.asarray(net.betweenness[:count], dtype=np.int64)
        net.quarantined[top] = True
        return params.quarantine_cost * len(top)
    raise ContractError(f"invalid epidemic action {action}")


def epidemic_reward(positives: int, cost: float, params: EpidemicParams, terminated: bool, n: int) -> float:
    r = -params.lam * positives - cost
    if terminated:
        r += params.terminal_bonus * n
    return r


@dataclass
class EpiObs:
    """Per-node test symbols (NEG/POS/UNK) and whether an episode just began."""

    symbols: np.ndarray
    new_episode: bool = False

    @property
    def positives(self) -> int:
        return int((self.symbols == POS).sum())


class EpidemicEnv(Environment):
    env_id = "epidemic"
    num_actions = NUM_ACTIONS
    action_names = ACTION_NAMES

    def __init__(self, seed: int = 0, graph: nx.Graph | None = None, params: EpidemicParams = EpidemicParams(),
                 graph_kind: str = "watts_strogatz", num_nodes: int = 100, graph_seed: int | None = None,
                 graph_params: dict | None = None, reward_range: tuple | None = None, reward_bits: int = 8, log_path=None):
        super().__init__(seed)
        if graph is None:
            graph = make_graph(graph_kind, num_nodes, seed if graph_seed is None else graph_seed,
                               **(graph_params or {}))
        self.net = ContactNetwork(graph)
        self.params = params
        n = self.net.n
        lo, hi = reward_range or (-(params.lam + params.quarantine_cost) * n, params.terminal_bonus * n)
        self.reward_space = SymbolSpace.quantised(lo, hi, reward_bits)
        self.observation_space = SymbolSpace(n + 1)
        self.log_path = log_path
        self._log = None
        self.episode = 0

    def _reset(self):
        self.episode_step = 0
        self.net.immunity[:] = 1.0
        self.net.quarantined[:] = False
        self.net.labels[:] = S
        k = max(1, round(self.params.initial_infected * self.net.n))
        self.net.labels[self.rng.choice(self.net.n, size=k, replace=False)] = I
        self.episode_return = 0.0
        symbols = np.full(self.net.n, UNK, dtype=np.int8)
        return EpiObs(symbols, True)

    def infection_rate(self) -> float:
        return float((self.net.labels == I).mean())

    def _step(self, action: int) -> Percept:
        p = self.params
        cost = apply_action(self.net, action, p)
        self.net.labels = seirs_step(self.net.labels, self.net.immunity, self.net.adjacency,
                                     self.net.quarantined, p, self.rng)
        symbols = emit_observations(self.net.labels, p, self.rng)
        self.episode_step += 1
        positives = int((symbols == POS).sum())
        terminated = not ((self.net.labels == E) | (self.net.labels == I)).any()
        truncated = not terminated and self.episode_step >= p.max_steps
        r = epidemic_reward(positives, cost, p, terminated, self.net.n)
        self.episode_return += r
        info = {"infection_rate": self.infection_rate(), "positives": positives, "episode": self.episode,
                "episode_step": self.episode_step, "terminated": terminated, "truncated": truncated,
                "action_cost": cost}
        if self.log_path is not None:
            self._write_log(action, info, r)
        done = terminated or truncated
        if done:
            info["episode_return"] = self.episode_return
            self.episode += 1
            obs = self._reset()
        else:
            obs = EpiObs(symbols, False)
        return Percept(obs, r, done, info)

    def _write_log(self, action, info, r):
        if self._log is None:
            self._log = open(self.log_path, "w")
        self._log.write(json.dumps({"episode": info["episode"], "step": info["episode_step"], "action": action,
                                    "infection_rate": round(info["infection_rate"], 6),
                                    "positives": info["positives"], "reward": r}, sort_keys=True) + "\n")

    def close(self):
        if self._log is not None:
            self._log.close()
            self._log = None

    def observation_id(self, obs) -> int:
        return obs.positives

    def summarize(self, obs) -> str:
        return f"{obs.positives}+/{int((obs.symbols == UNK).sum())}?"

    def with_params(self, **kw) -> EpidemicParams:
        return replace(self.params, **kw)
