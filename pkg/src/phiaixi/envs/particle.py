"""Bootstrap particle filter over SEIRS label assignments."""
from __future__ import annotations

import numpy as np

from .epidemic import I, ContactNetwork, EpidemicParams, apply_action, seirs_step, S


class ParticleBelief:
    """M particles, each a full label vector, with normalised weights.

    The filter tracks its own copy of the immunity and quarantine state, which
    are deterministic functions of the action sequence.
    """

    def __init__(self, net: ContactNetwork, params: EpidemicParams, num_particles: int = 100, seed: int = 0):
        if num_particles < 1:
            raise ValueError("need at least one particle")
        self.template = net
        self.params = params
        self.M = num_particles
        self.rng = np.random.default_rng(seed)
        self.degenerate_steps = 0
        self.reset()

    def reset(self) -> None:
        n = self.template.n
        self.immunity = np.ones(n)
        self.quarantined = np.zeros(n, dtype=bool)
        k = max(1, round(self.params.initial_infected * n))
        self.particles = np.full((self.M, n), S, dtype=np.int8)
        for m in range(self.M):
            self.particles[m, self.rng.choice(n, size=k, replace=False)] = I
        self.weights = np.full(self.M, 1.0 / self.M)
        self.last_mean = float((self.particles == I).mean())

    def _apply(self, action: int) -> None:
        shadow = _Shadow(self.template, self.immunity, self.quarantined)
        apply_action(shadow, action, self.params)

    def update(self, action: int, symbols: np.ndarray | None) -> float:
        """Propagate, weight by the observation and resample; returns E[infection rate]."""
        self._apply(action)
        self.particles = seirs_step(self.particles, self.immunity, self.template.adjacency, self.quarantined,
                                    self.params, self.rng)
        if symbols is not None:
            table = self.params.emission_table()
            lik = table[self.particles, symbols[None, :]]
            impossible = (lik == 0).any(axis=1)
            ll = np.log(np.maximum(lik, 1e-300)).sum(axis=1)
            ll[impossible] = -np.inf
            w = np.exp(ll - ll.max()) if not impossible.all() else np.zeros(self.M)
            w *= self.weights
            total = w.sum()
            if not np.isfinite(total) or total <= 0:
                self.degenerate_steps += 1
                w = np.full(self.M, 1.0 / self.M)
            else:
                w /= total
        else:
            w = self.weights
        self.last_mean = float(w @ (self.particles == I).mean(axis=1))
        self._resample(w)
        return self.last_mean

    def _resample(self, w: np.ndarray) -> None:
        positions = (self.rng.random() + np.arange(self.M)) / self.M
        idx = np.minimum(np.searchsorted(np.cumsum(w), positions), self.M - 1)
        self.particles = self.particles[idx]
        self.weights = np.full(self.M, 1.0 / self.M)

    def infection_rate(self) -> float:
        return self.last_mean


class _Shadow:
    """Minimal network view so apply_action can mutate the filter's own state."""

    def __init__(self, net: ContactNetwork, immunity, quarantined):
        self.n = net.n
        self.between_bands = net.between_bands
        self.betweenness = net.betweenness
        self.immunity = immunity
        self.quarantined = quarantined


def particle_update(belief: ParticleBelief, action: int, symbols) -> ParticleBelief:
    belief.update(action, symbols)
    return belief
