"""Set-function algebra over coalitions of features.

Feature ``i`` (1-based) occupies bit ``i - 1`` of a coalition bit pattern, and a
game tensor stores ``nu(S)`` at index ``bits(S)``. All transforms use the
in-place subset-sum recursion and run in ``O(d * 2**d)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator, Union

import numpy as np

MAX_FEATURES = 25

GAME_KINDS = ("local", "sensitivity", "risk", "raw")
INDEX_KINDS = (
    "moebius",
    "co_moebius",
    "sv",
    "gv",
    "sii",
    "k_sii",
    "pure",
    "full",
    "sobol_closed",
    "sobol_total",
    "upsilon",
)


class PreconditionError(ValueError):
    """Raised when an operation is called outside its domain."""


@dataclass(frozen=True, order=True)
class Coalition:
    """A subset of the feature set ``{1, ..., d}`` stored as a bit pattern."""

    bits: int
    d: int

    def __post_init__(self):
        if not 0 <= self.d <= MAX_FEATURES:
            raise PreconditionError(f"d must be in [0, {MAX_FEATURES}], got {self.d}")
        if self.bits < 0 or self.bits >> self.d:
            raise PreconditionError(f"bit pattern {self.bits:#b} has features beyond d={self.d}")

    @classmethod
    def from_features(cls, features: Iterable[int], d: int) -> "Coalition":
        bits = 0
        for i in features:
            i = int(i)
            if not 1 <= i <= d:
                raise PreconditionError(f"feature index {i} outside 1..{d}")
            bits |= 1 << (i - 1)
        return cls(bits, d)

    @classmethod
    def empty(cls, d: int) -> "Coalition":
        return cls(0, d)

    @classmethod
    def grand(cls, d: int) -> "Coalition":
        return cls((1 << d) - 1, d)

    @property
    def features(self) -> tuple[int, ...]:
        return bits_to_features(self.bits)

    def complement(self) -> "Coalition":
        return Coalition(((1 << self.d) - 1) ^ self.bits, self.d)

    def __len__(self) -> int:
        return popcount(self.bits)

    def __iter__(self) -> Iterator[int]:
        return iter(self.features)

    def __contains__(self, i: int) -> bool:
        return bool(self.bits >> (i - 1) & 1)

    def __or__(self, other: "Coalition") -> "Coalition":
        return Coalition(self.bits | other.bits, max(self.d, other.d))

    def __and__(self, other: "Coalition") -> "Coalition":
        return Coalition(self.bits & other.bits, max(self.d, other.d))

    def __repr__(self) -> str:
        return "{" + ",".join(map(str, self.features)) + "}"


CoalitionLike = Union[Coalition, Iterable[int]]


def popcount(bits: int) -> int:
    return bin(bits).count("1")


def bits_to_features(bits: int) -> tuple[int, ...]:
    out = []
    i = 1
    while bits:
        if bits & 1:
            out.append(i)
        bits >>= 1
        i += 1
    return tuple(out)


def as_bits(S: CoalitionLike, d: int) -> int:
    """Convert a coalition or an iterable of 1-based feature indices to bits."""
    if isinstance(S, Coalition):
        if S.bits >> d:
            raise PreconditionError(f"coalition {S!r} has features beyond d={d}")
        return S.bits
    if isinstance(S, (int, np.integer)):
        raise TypeError("pass a Coalition or an iterable of 1-based feature indices, not a bare int")
    return Coalition.from_features(S, d).bits


def subsets_of(S: Coalition) -> list[Coalition]:
    """All subsets of ``S`` in ascending bit-pattern order (``S`` included)."""
    out = []
    sub = 0
    # enumerate submasks upwards: next = (sub - S) & S
    while True:
        out.append(Coalition(sub, S.d))
        if sub == S.bits:
            break
        sub = (sub - S.bits) & S.bits
    return out


def submasks(bits: int) -> Iterator[int]:
    """Submasks of ``bits`` in ascending order."""
    sub = 0
    while True:
        yield sub
        if sub == bits:
            return
        sub = (sub - bits) & bits


def coalitions_of_size(d: int, k: int) -> list[int]:
    """Bit patterns of all size-``k`` coalitions, ascending."""
    out = [sum(1 << (i - 1) for i in c) for c in combinations(range(1, d + 1), k)]
    return sorted(out)


def canonical_order(d: int, max_order: int | None = None, min_order: int = 0) -> list[int]:
    """Bit patterns sorted by size, then by bit pattern."""
    top = d if max_order is None else max_order
    out = []
    for k in range(min_order, top + 1):
        out.extend(coalitions_of_size(d, k))
    return out


@dataclass
class GameTensor:
    """All ``2**d`` values of a cooperative game, indexed by bit pattern."""

    d: int
    values: np.ndarray
    kind: str = "raw"

    def __post_init__(self):
        if not 0 <= self.d <= MAX_FEATURES:
            raise PreconditionError(f"d must be in [0, {MAX_FEATURES}], got {self.d}")
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (1 << self.d,):
            raise PreconditionError(
                f"expected {1 << self.d} values for d={self.d}, got shape {self.values.shape}"
            )
        if not np.all(np.isfinite(self.values)):
            raise PreconditionError("game values must be finite")
        if self.kind not in GAME_KINDS:
            raise PreconditionError(f"unknown game kind {self.kind!r}")

    def value(self, bits: int) -> float:
        return float(self.values[bits])

    def __getitem__(self, S: CoalitionLike) -> float:
        return self.value(as_bits(S, self.d))

    @property
    def grand_bits(self) -> int:
        return (1 << self.d) - 1

    def shifted(self, c: float) -> "GameTensor":
        return GameTensor(self.d, self.values + c, self.kind)


@dataclass
class InteractionValues:
    """Scores for coalitions of size ``1..max_order``.

    Keys are sorted tuples of 1-based feature indices. ``baseline_value`` holds
    the empty-coalition score when the index defines one.
    """

    entries: dict[tuple[int, ...], float]
    index_kind: str
    max_order: int
    d: int
    baseline_value: float | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.index_kind not in INDEX_KINDS:
            raise PreconditionError(f"unknown index kind {self.index_kind!r}")
        if self.index_kind == "sv" and self.max_order != 1:
            raise PreconditionError("Shapley values have max_order 1")
        for key in self.entries:
            if not 1 <= len(key) <= self.max_order:
                raise PreconditionError(f"coalition {key} outside orders 1..{self.max_order}")

    def __getitem__(self, S: CoalitionLike) -> float:
        return self.entries[bits_to_features(as_bits(S, self.d))]

    def __len__(self) -> int:
        return len(self.entries)

    def items(self) -> list[tuple[tuple[int, ...], float]]:
        """Entries in canonical order: ascending size, then ascending bit pattern."""
        def key(item):
            feats = item[0]
            return len(feats), sum(1 << (i - 1) for i in feats)

        return sorted(self.entries.items(), key=key)

    def as_array(self) -> np.ndarray:
        """Order-1 scores as a length-``d`` vector (missing features are 0)."""
        out = np.zeros(self.d)
        for feats, v in self.entries.items():
            if len(feats) == 1:
                out[feats[0] - 1] = v
        return out


def _check_tensor(nu: GameTensor) -> None:
    if not isinstance(nu, GameTensor):
        raise TypeError(f"expected GameTensor, got {type(nu).__name__}")


def _butterfly(values: np.ndarray, d: int, op: str) -> np.ndarray:
    out = np.array(values, dtype=float, copy=True)
    for i in range(d):
        view = out.reshape(-1, 2, 1 << i)
        if op == "moebius":
            view[:, 1, :] -= view[:, 0, :]
        elif op == "zeta":
            view[:, 1, :] += view[:, 0, :]
        elif op == "superset_sum":
            view[:, 0, :] += view[:, 1, :]
        elif op == "superset_moebius":
            view[:, 0, :] -= view[:, 1, :]
    return out


def moebius_transform(nu: GameTensor) -> GameTensor:
    """Moebius transform ``m(S) = sum_{T subset S} (-1)**(|S|-|T|) nu(T)``."""
    _check_tensor(nu)
    return GameTensor(nu.d, _butterfly(nu.values, nu.d, "moebius"), "raw")


def inverse_moebius(m: GameTensor) -> GameTensor:
    """Recover the game from its Moebius transform, ``nu(T) = sum_{S subset T} m(S)``."""
    _check_tensor(m)
    return GameTensor(m.d, _butterfly(m.values, m.d, "zeta"), "raw")


def co_moebius_transform(nu: GameTensor) -> GameTensor:
    """Co-Moebius transform: ``m~(S) = sum_{T superset S} m(T) = Delta_S(-S)``."""
    _check_tensor(nu)
    m = _butterfly(nu.values, nu.d, "moebius")
    return GameTensor(nu.d, _butterfly(m, nu.d, "superset_sum"), "raw")


def superset_sums(values: np.ndarray, d: int) -> np.ndarray:
    """``out[S] = sum_{T superset S} values[T]`` for a length ``2**d`` array."""
    return _butterfly(values, d, "superset_sum")


def discrete_derivative(nu: GameTensor, S: CoalitionLike, T: CoalitionLike) -> float:
    """``Delta_S(T) = sum_{L subset S} (-1)**(|S|-|L|) nu(T | L)`` for disjoint ``S``, ``T``."""
    s_bits = as_bits(S, nu.d)
    t_bits = as_bits(T, nu.d)
    if s_bits & t_bits:
        raise PreconditionError("discrete derivative requires S and T to be disjoint")
    s = popcount(s_bits)
    total = 0.0
    for sub in submasks(s_bits):
        sign = -1.0 if (s - popcount(sub)) % 2 else 1.0
        total += sign * nu.values[t_bits | sub]
    return total
