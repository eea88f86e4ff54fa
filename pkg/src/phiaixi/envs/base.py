"""Shared episodic environment interface."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..core import ContractError, SymbolSpace


@dataclass
class Percept:
    observation: Any
    reward: float
    done: bool = False
    info: dict = field(default_factory=dict)


class Environment:
    """Base class.

    ``step`` returns a Percept; when an episode ends the environment resets
    itself and the returned observation is the first one of the next episode
    (``done`` marks the boundary). Everything random flows from ``self.rng``.
    """

    env_id = "base"
    num_actions = 1
    action_names: tuple[str, ...] = ()
    observation_space = SymbolSpace(1)
    reward_space = SymbolSpace.of_values((0.0,))

    def __init__(self, seed: int = 0):
        self.seed = seed
        self.rng = np.random.default_rng(seed)
        self._started = False

    def reset(self):
        self._started = True
        return self._reset()

    def step(self, action: int) -> Percept:
        if not self._started:
            raise ContractError("call reset() before step()")
        if not 0 <= int(action) < self.num_actions:
            raise ContractError(f"invalid action {action} for {self.env_id}")
        return self._step(int(action))

    def _reset(self):
        raise NotImplementedError

    def _step(self, action: int) -> Percept:
        raise NotImplementedError

    def observation_id(self, obs) -> int:
        """Integer code of an observation for fixed-width binarisation."""
        return int(obs)

    def summarize(self, obs) -> str:
        return str(self.observation_id(obs))

    @property
    def reward_bounds(self) -> tuple[float, float]:
        return self.reward_space.bounds
