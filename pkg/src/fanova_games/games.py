"""Local, sensitivity and risk explanation games built from a value function."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .coalitions import (
    MAX_FEATURES,
    GameTensor,
    InteractionValues,
    PreconditionError,
    bits_to_features,
    moebius_transform,
)
from .gaussian import Dataset, GaussianSpec, sample
from .value_functions import ValueFunction, coalition_bits

LOG_LOSS_CLAMP = 1e-12
DEFAULT_EVAL_POINTS = 500

Points = Union[Dataset, np.ndarray, tuple]


class Game:
    """Lazily evaluated game with memoised coalition values.

    ``evaluations`` counts distinct coalitions queried so far, which is the
    explanation cost of whatever measure was computed from it.
    """

    def __init__(self, func: Callable[[int], float], d: int, kind: str = "raw"):
        if not 0 <= d <= MAX_FEATURES:
            raise PreconditionError(f"d must be in [0, {MAX_FEATURES}], got {d}")
        self._func = func
        self.d = d
        self.kind = kind
        self._values: dict[int, float] = {}

    def value(self, bits: int) -> float:
        if bits not in self._values:
            self._values[bits] = float(self._func(bits))
        return self._values[bits]

    def __call__(self, S) -> float:
        return self.value(coalition_bits(S, self.d))

    def __getitem__(self, S) -> float:
        return self(S)

    @property
    def evaluations(self) -> int:
        return len(self._values)

    @property
    def grand_bits(self) -> int:
        return (1 << self.d) - 1

    def to_tensor(self, progress: Optional[Callable[[int, int], None]] = None) -> GameTensor:
        total = 1 << self.d
        values = np.empty(total)
        for bits in range(total):
            values[bits] = self.value(bits)
            if progress is not None:
                progress(bits + 1, total)
        return GameTensor(self.d, values, self.kind)


def as_tensor(game: Union[Game, GameTensor]) -> GameTensor:
    return game if isinstance(game, GameTensor) else game.to_tensor()


def _tensor(vf: ValueFunction, func, kind: str, lazy: bool, progress) -> Union[Game, GameTensor]:
    game = Game(func, vf.d, kind)
    return game if lazy else game.to_tensor(progress)


def resolve_points(points: Points, d: int) -> tuple[np.ndarray, Optional[np.ndarray]]:
    """Evaluation points as ``(X, y)`` from a dataset, an array, or ``(spec, n, seed)``."""
    if isinstance(points, Dataset):
        return points.x, points.y
    if isinstance(points, tuple):
        spec, n, seed = points
        if not isinstance(spec, GaussianSpec):
            raise TypeError("expected (GaussianSpec, n, seed)")
        return sample(spec, n, seed, "points"), None
    X = np.atleast_2d(np.asarray(points, dtype=float))
    if X.shape[1] != d:
        raise ValueError(f"points have {X.shape[1]} features, expected {d}")
    return X, None


def local_game(vf: ValueFunction, x0, lazy: bool = False, progress=None):
    """``nu(S) = F_S(x0)`` for every coalition."""
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (vf.d,):
        raise ValueError(f"x0 must have length {vf.d}")
    X = x0[None, :]
    return _tensor(vf, lambda bits: vf.batch(bits, X)[0], "local", lazy, progress)


def fanova_decomposition(local: GameTensor) -> InteractionValues:
    """fANOVA effects ``f_S(x0)`` as the Moebius transform of a local game."""
    if local.kind != "local":
        raise PreconditionError("fANOVA decomposition needs a local game")
    m = moebius_transform(local)
    entries = {bits_to_features(b): float(m.values[b]) for b in range(1, 1 << local.d)}
    return InteractionValues(entries, "moebius", max(local.d, 1), local.d, float(m.values[0]))


def sensitivity_game(vf: ValueFunction, points: Points, lazy: bool = False, progress=None):
    """``nu(S)`` = sample variance (``n - 1`` denominator) of ``F_S`` over shared points."""
    X, _ = resolve_points(points, vf.d)
    if X.shape[0] < 2:
        raise PreconditionError("sensitivity game needs at least 2 evaluation points")

    def func(bits):
        if bits == 0:
            return 0.0
        return float(np.var(vf.batch(bits, X), ddof=1))

    return _tensor(vf, func, "sensitivity", lazy, progress)


def loss_values(pred: np.ndarray, y: np.ndarray, loss: str) -> np.ndarray:
    if loss == "squared":
        return (pred - y) ** 2
    if loss == "log":
        if not np.all(np.isin(y, (0.0, 1.0))):
            raise PreconditionError("log loss needs labels in {0, 1}")
        p = np.clip(pred, LOG_LOSS_CLAMP, 1.0 - LOG_LOSS_CLAMP)
        return -(y * np.log(p) + (1.0 - y) * np.log(1.0 - p))
    raise PreconditionError(f"unknown loss {loss!r}; expected 'squared' or 'log'")


def risk_game(vf: ValueFunction, data: Dataset, loss: str = "squared", lazy: bool = False, progress=None):
    """Negative risk ``nu(S) = -mean_k loss(F_S(x_k), y_k)``."""
    if data.y is None:
        raise PreconditionError("risk game needs labelled data")
    X, y = data.x, data.y
    loss_values(y.copy(), y, loss)  # validates labels up front

    def func(bits):
        return -float(np.mean(loss_values(vf.batch(bits, X), y, loss)))

    return _tensor(vf, func, "risk", lazy, progress)


def risk_game_with_se(vf: ValueFunction, data: Dataset, S, loss: str = "squared") -> tuple[float, float]:
    """One risk-game value with the standard error of the per-sample loss mean."""
    bits = coalition_bits(S, vf.d)
    losses = loss_values(vf.batch(bits, data.x), data.y, loss)
    return -float(losses.mean()), float(losses.std(ddof=1) / np.sqrt(losses.size))


@dataclass
class GameConfig:
    """Which explanation game to build and on what data."""

    game_kind: str
    value_function: ValueFunction
    x0: Optional[np.ndarray] = None
    eval_points: Optional[Points] = None
    loss: str = "squared"

    def __post_init__(self):
        if self.game_kind not in ("local", "sensitivity", "risk"):
            raise PreconditionError(f"unknown game kind {self.game_kind!r}")
        if self.game_kind == "local" and self.x0 is None:
            raise PreconditionError("local game needs x0")
        if self.game_kind in ("sensitivity", "risk") and self.eval_points is None:
            raise PreconditionError(f"{self.game_kind} game needs evaluation points")
        if self.game_kind == "risk" and not (
            isinstance(self.eval_points, Dataset) and self.eval_points.y is not None
        ):
            raise PreconditionError("risk game needs a labelled dataset")


def build_game(config: GameConfig, lazy: bool = True, progress=None):
    vf = config.value_function
    if config.game_kind == "local":
        return local_game(vf, config.x0, lazy, progress)
    if config.game_kind == "sensitivity":
        return sensitivity_game(vf, config.eval_points, lazy, progress)
    return risk_game(vf, config.eval_points, config.loss, lazy, progress)
