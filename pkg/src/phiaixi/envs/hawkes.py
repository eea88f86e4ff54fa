"""Discrete-time Hawkes arrivals."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence


@dataclass(frozen=True)
class HawkesParams:
    mu0: float = 0.05
    alpha: float = 0.3
    beta: float = 0.5


def hawkes_intensity(events: Sequence[float], t: float, params: HawkesParams) -> float:
    """mu0 + sum over past events of alpha * exp(-beta * (t - t_i))."""
    lam = params.mu0
    for ti in events:
        if ti < t:
            lam += params.alpha * math.exp(-params.beta * (t - ti))
    return lam


def arrival_probability(intensity: float) -> float:
    return 1.0 - math.exp(-intensity)


class HawkesState:
    """Recursive form of the exponential kernel: O(1) per step."""

    __slots__ = ("params", "excitation", "t")

    def __init__(self, params: HawkesParams):
        self.params = params
        self.excitation = 0.0
        self.t = 0

    def intensity(self) -> float:
        return self.params.mu0 + self.excitation

    def advance(self, arrived: bool) -> None:
        """Move from t to t+1, registering an event at t if ``arrived``."""
        decay = math.exp(-self.params.beta)
        self.excitation = (self.excitation + (self.params.alpha if arrived else 0.0)) * decay
        self.t += 1
