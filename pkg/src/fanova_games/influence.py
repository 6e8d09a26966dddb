"""Pure, partial and full effects for individual, joint and interaction influence.

Every measure here is a fixed summary of the game's Moebius transform ``m``:

=========== ============================== ======================================
effect      individual / joint             interaction
=========== ============================== ======================================
pure        ``nu(S) - nu({})``             ``m(S)``
partial     Shapley value / Shapley GV     Shapley interaction index
full        ``nu(D) - nu(-S)``             ``Delta_S(-S)`` (co-Moebius)
=========== ============================== ======================================

Pure and full effects only touch ``2`` (individual, joint) or ``2**|S|``
(interaction) coalitions, so they work on lazy :class:`~fanova_games.games.Game`
objects without materialising all ``2**d`` values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Callable, Optional, Union

import numpy as np

from .coalitions import (
    GameTensor,
    InteractionValues,
    PreconditionError,
    bits_to_features,
    coalitions_of_size,
    moebius_transform,
    popcount,
    submasks,
)
from .games import Game, as_tensor, resolve_points
from .gaussian import stream
from .value_functions import ValueFunction, coalition_bits

EFFECTS = ("pure", "partial", "full")
INFLUENCE_TYPES = ("individual", "joint", "interaction")
H_STAT_DEGENERATE = 1e-12

AnyGame = Union[Game, GameTensor]


@dataclass
class EffectRequest:
    """One cell of the pure/partial/full x individual/joint/interaction grid."""

    effect: str
    influence_type: str
    order: Optional[int] = None
    targets: Optional[list[tuple[int, ...]]] = None

    def __post_init__(self):
        if self.effect not in EFFECTS:
            raise PreconditionError(f"unknown effect {self.effect!r}; expected one of {EFFECTS}")
        if self.influence_type not in INFLUENCE_TYPES:
            raise PreconditionError(
                f"unknown influence type {self.influence_type!r}; expected one of {INFLUENCE_TYPES}"
            )
        if self.targets is not None:
            self.targets = [tuple(sorted(int(i) for i in t)) for t in self.targets]
            if self.influence_type == "individual" and any(len(t) != 1 for t in self.targets):
                raise PreconditionError("individual targets must be single features")

    def resolve_targets(self, d: int) -> list[int]:
        """Target bit patterns; defaults to every coalition of size ``order``."""
        if self.order is not None and not 1 <= self.order <= d:
            raise PreconditionError(f"order must be in 1..{d}, got {self.order}")
        if self.targets is not None:
            return [coalition_bits(t, d) for t in self.targets]
        if self.influence_type == "individual":
            return coalitions_of_size(d, 1)
        return coalitions_of_size(d, self.order or min(2, d))


def _value(game: AnyGame, bits: int) -> float:
    return game.value(bits)


def _sign(k: int) -> float:
    return -1.0 if k % 2 else 1.0


def _check_individual(bits: int, influence_type: str):
    if influence_type == "individual" and popcount(bits) != 1:
        raise PreconditionError("individual effects need a single feature")


# --- pure / full ---------------------------------------------------------------


def pure_effect(game: AnyGame, S, influence_type: str = "joint") -> float:
    """Contribution of ``S`` in the absence of all other features."""
    bits = coalition_bits(S, game.d)
    _check_individual(bits, influence_type)
    if influence_type == "interaction":
        s = popcount(bits)
        return sum(_sign(s - popcount(t)) * _value(game, t) for t in submasks(bits))
    return _value(game, bits) - _value(game, 0)


def full_effect(game: AnyGame, S, influence_type: str = "joint") -> float:
    """Contribution of ``S`` in the presence of all other features."""
    bits = coalition_bits(S, game.d)
    _check_individual(bits, influence_type)
    grand = (1 << game.d) - 1
    rest = grand ^ bits
    if influence_type == "interaction":
        s = popcount(bits)
        return sum(_sign(s - popcount(t)) * _value(game, rest | t) for t in submasks(bits))
    return _value(game, grand) - _value(game, rest)


def partial_effect(game: AnyGame, S, influence_type: str = "joint") -> float:
    """Shapley value, Shapley generalized value or Shapley interaction index of ``S``."""
    bits = coalition_bits(S, game.d)
    _check_individual(bits, influence_type)
    if influence_type == "interaction":
        return shapley_interaction_index(game, bits)
    return generalized_value(game, bits)


# --- partial: Moebius route ------------------------------------------------------


_POPCOUNT_CACHE: dict[int, np.ndarray] = {}


def _popcounts(d: int) -> np.ndarray:
    if d not in _POPCOUNT_CACHE:
        pc = np.zeros(1 << d, dtype=np.int64)
        for i in range(d):
            pc[1 << i : 1 << (i + 1)] = pc[: 1 << i] + 1
        _POPCOUNT_CACHE[d] = pc
    return _POPCOUNT_CACHE[d]


def _moebius_values(game: AnyGame) -> np.ndarray:
    return moebius_transform(as_tensor(game)).values


def shapley_value(game: AnyGame, route: str = "moebius") -> InteractionValues:
    """Shapley values of every feature.

    ``route="moebius"`` shares each ``m(S)`` equally among the members of
    ``S``; ``route="marginal"`` averages marginal contributions with the
    classical weights ``t! (d-t-1)! / d!``. Both give the same numbers.
    """
    tensor = as_tensor(game)
    d = tensor.d
    pc = _popcounts(d)
    masks = np.arange(1 << d)
    phi = np.zeros(d)
    if route == "moebius":
        m = moebius_transform(tensor).values
        share = np.zeros_like(m)
        share[1:] = m[1:] / pc[1:]
        for i in range(d):
            phi[i] = share[(masks >> i) & 1 == 1].sum()
    elif route == "marginal":
        w = np.array([factorial(t) * factorial(d - t - 1) / factorial(d) for t in range(d)])
        for i in range(d):
            without = masks[(masks >> i) & 1 == 0]
            delta = tensor.values[without | (1 << i)] - tensor.values[without]
            phi[i] = np.dot(w[pc[without]], delta)
    else:
        raise PreconditionError(f"unknown route {route!r}")
    entries = {(i + 1,): float(phi[i]) for i in range(d)}
    return InteractionValues(entries, "sv", 1, d, float(tensor.values[0]))


def generalized_value(game: AnyGame, S, route: str = "moebius") -> float:
    """Shapley generalized value of the group ``S``.

    Moebius route: ``sum_{T meets S} m(T) / (|T \\ S| + 1)``. The marginal route
    uses the probabilistic weights ``1 / ((d-s+1) * C(d-s, t))`` on joint
    marginal contributions.
    """
    tensor = as_tensor(game)
    d = tensor.d
    bits = coalition_bits(S, d)
    if bits == 0:
        raise PreconditionError("generalized value needs a non-empty coalition")
    pc = _popcounts(d)
    masks = np.arange(1 << d)
    if route == "moebius":
        m = moebius_transform(tensor).values
        hit = (masks & bits) != 0
        outside = pc[masks & ~bits]
        return float(np.sum(m[hit] / (outside[hit] + 1)))
    if route == "marginal":
        s = popcount(bits)
        rest = masks[(masks & bits) == 0]
        t = pc[rest]
        p = 1.0 / ((d - s + 1) * np.array([comb(d - s, k) for k in t], dtype=float))
        return float(np.dot(p, tensor.values[rest | bits] - tensor.values[rest]))
    raise PreconditionError(f"unknown route {route!r}")


def shapley_interaction_index(game: AnyGame, S, route: str = "moebius") -> float:
    """Shapley interaction index of ``S``.

    Moebius route: ``sum_{T superset S} m(T) / (|T| - |S| + 1)``. The marginal
    route averages discrete derivatives ``Delta_S(T)`` with the generalized
    value weights.
    """
    tensor = as_tensor(game)
    d = tensor.d
    bits = coalition_bits(S, d)
    if bits == 0:
        raise PreconditionError("interaction index needs a non-empty coalition")
    pc = _popcounts(d)
    masks = np.arange(1 << d)
    s = popcount(bits)
    if route == "moebius":
        m = moebius_transform(tensor).values
        sup = (masks & bits) == bits
        return float(np.sum(m[sup] / (pc[sup] - s + 1)))
    if route == "marginal":
        rest = masks[(masks & bits) == 0]
        delta = np.zeros(rest.size)
        for sub in submasks(bits):
            delta += _sign(s - popcount(sub)) * tensor.values[rest | sub]
        p = 1.0 / ((d - s + 1) * np.array([comb(d - s, k) for k in pc[rest]], dtype=float))
        return float(np.dot(p, delta))
    raise PreconditionError(f"unknown route {route!r}")


def _all_sii(m: np.ndarray, d: int) -> np.ndarray:
    """SII of every coalition at once.

    A superset-sum butterfly that tracks how many elements were added gives
    ``g[l, S] = sum_{T sup S, |T minus S| = l} m(T)``; SII weights layer ``l``
    by ``1 / (l + 1)``. Cost is O(d^2 2^d).
    """
    g = np.zeros((d + 1, m.size))
    g[0] = m
    for i in range(d):
        view = g.reshape(d + 1, -1, 2, 1 << i)
        view[1:, :, 0, :] += view[:-1, :, 1, :]
    return (g / np.arange(1, d + 2)[:, None]).sum(axis=0)


@lru_cache(maxsize=None)
def _bernoulli_exact(n: int) -> tuple[Fraction, ...]:
    # B_m = -1/(m+1) sum_{j<m} C(m+1, j) B_j, with B_1 = -1/2
    B = [Fraction(1)]
    for m in range(1, n + 1):
        B.append(-sum(comb(m + 1, j) * B[j] for j in range(m)) / (m + 1))
    return tuple(B)


def bernoulli_numbers(n: int) -> np.ndarray:
    """``B_0 .. B_n`` rounded once from exact rationals."""
    return np.array([float(b) for b in _bernoulli_exact(n)])


def k_sii(game: AnyGame, k: int) -> InteractionValues:
    """k-Shapley values: SII at order ``k``, Bernoulli-aggregated below.

    ``phi_k(S) = sum_{T sup S, |T| <= k} B_{|T|-|S|} * SII(T)`` where ``B_n``
    are the Bernoulli numbers (``B_1 = -1/2``). ``k = 1`` gives Shapley values
    and ``k = d`` the Moebius transform.
    """
    tensor = as_tensor(game)
    d = tensor.d
    if not 1 <= k <= d:
        raise PreconditionError(f"k must be in 1..{d}, got {k}")
    m = moebius_transform(tensor).values
    sii = _all_sii(m, d)
    bern = bernoulli_numbers(k)
    pc = _popcounts(d)
    masks = np.arange(1 << d)
    low = pc <= k
    entries = {}
    for size in range(1, k + 1):
        for bits in coalitions_of_size(d, size):
            sel = low & ((masks & bits) == bits)
            entries[bits_to_features(bits)] = float(np.dot(bern[pc[sel] - size], sii[sel]))
    return InteractionValues(entries, "k_sii", k, d, float(tensor.values[0]))


def moebius_values(game: AnyGame, max_order: Optional[int] = None) -> InteractionValues:
    """Moebius transform as interaction values (pure interactions of every order)."""
    tensor = as_tensor(game)
    d = tensor.d
    top = d if max_order is None else max_order
    m = moebius_transform(tensor).values
    entries = {bits_to_features(b): float(m[b]) for b in range(1, 1 << d) if popcount(b) <= top}
    return InteractionValues(entries, "moebius", max(top, 1), d, float(m[0]))


# --- sampled Shapley value ---------------------------------------------------------


@dataclass
class SampledValue:
    value: float
    stderr: float
    n_samples: int


def shapley_value_sampled(game: Union[AnyGame, Callable[[int], float]], i: int, m: int,
                          seed: int, d: Optional[int] = None) -> SampledValue:
    """Permutation-sampling estimate of the Shapley value of feature ``i``.

    Each sample draws a uniform permutation and records ``Delta_i`` on the
    set of features preceding ``i``. ``game`` may be a tensor, a lazy game, or
    a callable on bit patterns (then ``d`` is required).
    """
    if m < 1:
        raise PreconditionError("need at least one permutation")
    if isinstance(game, (Game, GameTensor)):
        d = game.d
        value = game.value
    else:
        if d is None:
            raise PreconditionError("d is required when game is a plain callable")
        cache: dict[int, float] = {}

        def value(bits):
            if bits not in cache:
                cache[bits] = float(game(bits))
            return cache[bits]

    if not 1 <= i <= d:
        raise PreconditionError(f"feature {i} outside 1..{d}")
    gen = stream(seed, "sv-permutations", i)
    perms = gen.permuted(np.tile(np.arange(d), (m, 1)), axis=1)
    pos = np.argmax(perms == i - 1, axis=1)
    weights = 1 << np.arange(d)
    before = np.arange(d)[None, :] < pos[:, None]
    prefixes = (np.where(before, weights[perms], 0)).sum(axis=1)
    bit_i = 1 << (i - 1)
    deltas = np.array([value(int(p) | bit_i) - value(int(p)) for p in prefixes])
    se = float(deltas.std(ddof=1) / np.sqrt(m)) if m > 1 else float("nan")
    return SampledValue(float(deltas.mean()), se, m)


# --- sensitivity-game summaries ------------------------------------------------------


def sobol_indices(nu_sens: AnyGame, S, normalized: bool = False) -> tuple[float, float]:
    """Closed and total Sobol' indices of ``S`` from a sensitivity game.

    closed = ``nu(S) - nu({})`` (pure joint effect), total = ``nu(D) - nu(-S)``
    (full joint effect). ``normalized`` divides both by ``nu(D) = V[F(X)]``.
    """
    if nu_sens.kind != "sensitivity":
        raise PreconditionError("Sobol' indices need a sensitivity game")
    closed = pure_effect(nu_sens, S, "joint")
    total = full_effect(nu_sens, S, "joint")
    if normalized:
        var = nu_sens.value((1 << nu_sens.d) - 1)
        if var == 0.0:
            raise ZeroDivisionError("cannot normalise: total variance is zero")
        return closed / var, total / var
    return closed, total


def superset_measure(nu_sens: AnyGame, S) -> float:
    """Superset importance ``sum_{T sup S} sigma_T**2``: co-Moebius of the sensitivity game."""
    if nu_sens.kind != "sensitivity":
        raise PreconditionError("superset measure needs a sensitivity game")
    return full_effect(nu_sens, S, "interaction")


@dataclass
class HStatistic:
    value: float
    degenerate: bool = False
    numerator: float = 0.0
    denominator: float = 0.0
    flags: list = field(default_factory=list)


def h_statistic(vf: ValueFunction, points, i: int, j: int) -> HStatistic:
    """Friedman's H: ``V[F_ij - F_i - F_j + F_{}] / V[F_ij]`` over shared points.

    Returns value 0 flagged ``degenerate`` when ``V[F_ij] < 1e-12``.
    """
    X, _ = resolve_points(points, vf.d)
    if X.shape[0] < 2:
        raise PreconditionError("H-statistic needs at least 2 evaluation points")
    bi, bj = 1 << (i - 1), 1 << (j - 1)
    f_ij = vf.batch(bi | bj, X)
    pure = f_ij - vf.batch(bi, X) - vf.batch(bj, X) + vf.batch(0, X)
    num = float(np.var(pure, ddof=1))
    den = float(np.var(f_ij, ddof=1))
    if den < H_STAT_DEGENERATE:
        return HStatistic(0.0, True, num, den, ["degenerate"])
    return HStatistic(num / den, False, num, den)


# --- dispatch ------------------------------------------------------------------------


def compute_effect(game: AnyGame, bits: int, effect: str, influence_type: str) -> float:
    if effect == "pure":
        return pure_effect(game, bits, influence_type)
    if effect == "full":
        return full_effect(game, bits, influence_type)
    return partial_effect(game, bits, influence_type)


def evaluate_request(game: AnyGame, request: EffectRequest) -> list[tuple[tuple[int, ...], float]]:
    """Scores for every target of ``request`` in canonical order.

    A partial interaction request without explicit targets returns the full
    k-Shapley values up to ``order``.
    """
    d = game.d
    if (request.effect == "partial" and request.influence_type == "interaction"
            and request.targets is None):
        k = request.order or min(2, d)
        return k_sii(game, k).items()
    targets = sorted(request.resolve_targets(d), key=lambda b: (popcount(b), b))
    return [(bits_to_features(b), compute_effect(game, b, request.effect, request.influence_type))
            for b in targets]


def effect_cost(effect: str, influence_type: str, s: int, d: int) -> int:
    """Game evaluations needed for one score: 2 for pure/full individual and
    joint effects, ``2**s`` for pure/full interactions, ``2**d`` for partial."""
    if effect == "partial":
        return 1 << d
    if influence_type == "interaction":
        return 1 << s
    return 2

