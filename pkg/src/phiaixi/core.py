"""Symbol spaces, fixed-width binarisation and the interaction history.

Bit strings are plain tuples of 0/1 ints with index 0 holding the most
significant bit, so ``bits[:i]`` is always "the first i bits" of a symbol.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Iterator, NamedTuple, Sequence

BitString = tuple[int, ...]


class ConfigError(ValueError):
    """Raised for invalid configuration or unrecognised identifiers."""


class ContractError(ValueError):
    """Raised when a caller violates an operation's preconditions."""


def int_to_bits(value: int, width: int) -> BitString:
    return tuple((value >> (width - 1 - i)) & 1 for i in range(width))


def bits_to_int(bits: Sequence[int]) -> int:
    v = 0
    for b in bits:
        v = (v << 1) | b
    return v


@dataclass(frozen=True)
class SymbolSpace:
    """A finite symbol alphabet with a fixed binary width.

    Three flavours share one type:

    * plain ids ``0..cardinality-1``;
    * enumerated ``values`` (exact coding, symbol id = position in ``values``);
    * a real interval ``value_range`` quantised into ``2**bit_width`` buckets.
    """

    cardinality: int
    bit_width: int = 0
    value_range: tuple[float, float] | None = None
    values: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.values is not None:
            object.__setattr__(self, "values", tuple(self.values))
            if self.cardinality != len(self.values):
                raise ConfigError("cardinality must equal len(values)")
        if self.cardinality < 1:
            raise ConfigError("cardinality must be positive")
        if self.bit_width == 0:
            object.__setattr__(self, "bit_width", max(1, math.ceil(math.log2(self.cardinality))))
        if self.bit_width < 1 or 2 ** self.bit_width < self.cardinality:
            raise ConfigError(f"bit width {self.bit_width} cannot hold {self.cardinality} symbols")
        if self.value_range is not None:
            lo, hi = self.value_range
            if not hi > lo:
                raise ConfigError("value_range must satisfy hi > lo")

    @classmethod
    def of_ids(cls, n: int) -> "SymbolSpace":
        return cls(n)

    @classmethod
    def of_values(cls, values: Sequence[float]) -> "SymbolSpace":
        return cls(len(values), values=tuple(values))

    @classmethod
    def quantised(cls, lo: float, hi: float, bits: int) -> "SymbolSpace":
        return cls(2 ** bits, bits, value_range=(float(lo), float(hi)))

    @property
    def is_quantised(self) -> bool:
        return self.value_range is not None

    @property
    def bounds(self) -> tuple[float, float]:
        """Smallest and largest value a symbol of this space can decode to."""
        if self.value_range is not None:
            return self.value_range
        if self.values is not None:
            return min(self.values), max(self.values)
        return 0.0, float(self.cardinality - 1)

    def index_of(self, value: Any) -> int:
        """Symbol id of ``value`` (bucket index for quantised spaces)."""
        if self.value_range is not None:
            lo, hi = self.value_range
            n = 2 ** self.bit_width
            idx = math.floor((float(value) - lo) / (hi - lo) * n)
            return min(max(idx, 0), n - 1)
        if self.values is not None:
            try:
                return self.values.index(value)
            except ValueError:
                raise ValueError(f"{value!r} is not a member of {self.values}") from None
        idx = int(value)
        if not 0 <= idx < self.cardinality:
            raise ValueError(f"symbol id {idx} out of range [0, {self.cardinality})")
        return idx

    def value_of(self, index: int) -> float:
        """Value represented by symbol id ``index`` (bucket midpoint if quantised)."""
        if self.value_range is not None:
            lo, hi = self.value_range
            return lo + (index + 0.5) * (hi - lo) / 2 ** self.bit_width
        if self.values is not None:
            return self.values[index]
        return index


def encode_symbol(value: Any, space: SymbolSpace) -> BitString:
    """Fixed-width binary code of a symbol id, enumerated value or real."""
    return int_to_bits(space.index_of(value), space.bit_width)


def decode_symbol(bits: Sequence[int], space: SymbolSpace):
    """Inverse of :func:`encode_symbol`.

    Returns the symbol id for id spaces, the enumerated value for value
    spaces, and the bucket midpoint for quantised spaces.
    """
    if len(bits) != space.bit_width:
        raise ValueError(f"expected {space.bit_width} bits, got {len(bits)}")
    idx = bits_to_int(bits)
    if space.value_range is not None:
        return space.value_of(idx)
    if idx >= space.cardinality:
        raise ValueError(f"decoded id {idx} exceeds cardinality {space.cardinality}")
    if space.values is not None:
        return space.values[idx]
    return idx


class Step(NamedTuple):
    action: int
    observation: Any
    reward: float


@dataclass
class History:
    """Append-only action/observation/reward record.

    ``cache`` is scratch space for feature functions; entries must be pure
    functions of the prefix they were computed from, which is what makes
    caching safe on an append-only sequence.
    """

    actions: list[int] = field(default_factory=list)
    observations: list[Any] = field(default_factory=list)
    rewards: list[float] = field(default_factory=list)
    cache: dict = field(default_factory=dict, repr=False, compare=False)

    def append(self, action: int, observation: Any, reward: float) -> None:
        self.actions.append(action)
        self.observations.append(observation)
        self.rewards.append(reward)

    def __len__(self) -> int:
        return len(self.actions)

    def __getitem__(self, t: int) -> Step:
        return Step(self.actions[t], self.observations[t], self.rewards[t])

    def __iter__(self) -> Iterator[Step]:
        for t in range(len(self)):
            yield self[t]

    def __getstate__(self):
        state = self.__dict__.copy()
        state["cache"] = {}
        return state


def write_history_csv(
    history: History,
    path,
    summarize: Callable[[Any], Any] = lambda o: o,
    start: int = 0,
) -> None:
    """One line per step: ``t, action, reward, observation``."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "action", "reward", "observation"])
        for t in range(start, len(history)):
            step = history[t]
            w.writerow([t + 1, step.action, repr(float(step.reward)), summarize(step.observation)])
