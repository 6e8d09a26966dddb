"""Independent reference values used to test the main code path.

Nothing here calls the transforms, value functions or games; closed forms are
written out term by term so that an error in the fast path cannot hide in a
shared helper.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .coalitions import GameTensor, PreconditionError
from .gaussian import GaussianSpec
from .model import MonomialMap, is_multilinear

FAMILIES = ("lin", "2int", "3int", "add")
NAIVE_MAX_D = 12


class UnsupportedCase(PreconditionError):
    """No closed form is available for this (case, S)."""


@dataclass
class OracleCase:
    """A model family with coefficients, an imputer kind and its distribution.

    Coefficient layouts:
        lin:  (b1, b2)                     F = b1 x1 + b2 x2
        2int: (b1, b2, b12)                F = lin + b12 x1 x2
        3int: (b1, b2, b3, b12, b123)      F = b1 x1 + b2 x2 + b3 x3 + b12 x1 x2 + b123 x1 x2 x3
        add:  (a1, a2, a3)                 F = a1 x1 + a2 x2^2 + a3 x3^3 over four features
    """

    model_family: str
    fanova_kind: str
    beta: np.ndarray
    baseline: Optional[np.ndarray] = None
    spec: Optional[GaussianSpec] = None
    d: int = field(init=False)

    def __post_init__(self):
        if self.model_family not in FAMILIES:
            raise PreconditionError(f"unknown family {self.model_family!r}")
        if self.fanova_kind not in ("b", "m", "c"):
            raise PreconditionError(f"unknown fANOVA kind {self.fanova_kind!r}")
        self.beta = np.asarray(self.beta, dtype=float)
        sizes = {"lin": 2, "2int": 3, "3int": 5, "add": 3}
        if self.beta.shape != (sizes[self.model_family],):
            raise PreconditionError(
                f"{self.model_family} needs {sizes[self.model_family]} coefficients"
            )
        self.d = {"lin": 2, "2int": 2, "3int": 3, "add": 4}[self.model_family]
        if self.fanova_kind == "b":
            if self.baseline is None or np.shape(self.baseline) != (self.d,):
                raise PreconditionError(f"b-fANOVA needs a baseline of length {self.d}")
            self.baseline = np.asarray(self.baseline, dtype=float)
        elif self.spec is None or self.spec.d != self.d:
            raise PreconditionError(f"{self.fanova_kind}-fANOVA needs a {self.d}-dim GaussianSpec")

    def model_text(self) -> str:
        c = [repr(float(v)) for v in self.beta]
        if self.model_family == "lin":
            return f"{c[0]}*x1 + {c[1]}*x2"
        if self.model_family == "2int":
            return f"{c[0]}*x1 + {c[1]}*x2 + {c[2]}*x1*x2"
        if self.model_family == "3int":
            return f"{c[0]}*x1 + {c[1]}*x2 + {c[2]}*x3 + {c[3]}*x1*x2 + {c[4]}*x1*x2*x3"
        return f"{c[0]}*x1 + {c[1]}*x2^2 + {c[2]}*x3^3"


def _key(S) -> tuple[int, ...]:
    return tuple(sorted(int(i) for i in S))


def closed_form_effect(case: OracleCase, S, x) -> float:
    """Closed-form fANOVA effect ``f_S(x)`` for ``case``.

    Raises:
        UnsupportedCase: for coalitions or settings without a closed form.
    """
    S = _key(S)
    x = np.asarray(x, dtype=float)
    if x.shape != (case.d,):
        raise PreconditionError(f"x must have length {case.d}")
    fam = case.model_family
    if fam in ("lin", "2int"):
        return _bivariate(case, S, x)
    if fam == "3int":
        return _three_way(case, S, x)
    return _additive(case, S, x)


def _bivariate(case: OracleCase, S: tuple, x: np.ndarray) -> float:
    kind = case.fanova_kind
    if kind == "b":
        b = case.baseline
        beta1, beta2 = case.beta[0], case.beta[1]
        beta12 = case.beta[2] if case.model_family == "2int" else 0.0
        if S == ():
            return beta1 * b[0] + beta2 * b[1] + beta12 * b[0] * b[1]
        if S in ((1,), (2,)):
            i, j = S[0] - 1, 2 - S[0]
            beta_i = case.beta[i]
            f_lin = beta_i * (x[i] - b[i])
            if case.model_family == "lin":
                return f_lin
            return f_lin + beta12 * b[j] * (x[i] - b[i])
        if S == (1, 2):
            if case.model_family == "lin":
                return 0.0
            return beta12 * (x[0] - b[0]) * (x[1] - b[1])
        raise UnsupportedCase(f"no closed form for S={S}")

    mu, sigma = case.spec.mu, case.spec.sigma
    xbar = x - mu
    beta = case.beta
    beta12 = beta[2] if case.model_family == "2int" else 0.0
    sigma12 = sigma[0, 1]
    var = np.diag(sigma)

    if S == ():
        return beta[0] * mu[0] + beta[1] * mu[1] + beta12 * (sigma12 + mu[0] * mu[1])

    if S in ((1,), (2,)):
        i, j = S[0] - 1, 2 - S[0]
        f_lin_m = beta[i] * xbar[i]
        if kind == "m":
            if case.model_family == "lin":
                return f_lin_m
            return f_lin_m + beta12 * mu[j] * xbar[i] - beta12 * sigma12
        f_lin_c = f_lin_m + xbar[i] * beta[j] * sigma12 / var[i]
        if case.model_family == "lin":
            return f_lin_c
        return f_lin_c + beta12 * xbar[i] * (mu[j] + sigma12 * x[i] / var[i]) - beta12 * sigma12

    if S == (1, 2):
        if kind == "m":
            if case.model_family == "lin":
                return 0.0
            return beta12 * xbar[0] * xbar[1] + beta12 * sigma12
        # c-fANOVA: interaction of F_lin collects the cross-correlation terms
        f_lin_c = -(xbar[0] * beta[1] * sigma12 / var[0] + xbar[1] * beta[0] * sigma12 / var[1])
        if case.model_family == "lin":
            return f_lin_c
        f_2int_m = beta12 * xbar[0] * xbar[1] + beta12 * sigma12
        return f_2int_m + f_lin_c - beta12 * sigma12 * (
            xbar[0] * x[0] / var[0] + xbar[1] * x[1] / var[1]
        )
    raise UnsupportedCase(f"no closed form for S={S}")


def _three_way(case: OracleCase, S: tuple, x: np.ndarray) -> float:
    """Independent zero-mean unit-variance features (or b = 0): each monomial is its own effect."""
    if case.fanova_kind == "b":
        if np.any(case.baseline != 0.0):
            raise UnsupportedCase("3int closed form needs b = 0")
    else:
        if np.any(case.spec.mu != 0.0) or not np.allclose(case.spec.sigma, np.eye(3), atol=0.0):
            raise UnsupportedCase("3int closed form needs independent standard normal features")
    b1, b2, b3, b12, b123 = case.beta
    table = {
        (): 0.0,
        (1,): b1 * x[0],
        (2,): b2 * x[1],
        (3,): b3 * x[2],
        (1, 2): b12 * x[0] * x[1],
        (1, 3): 0.0,
        (2, 3): 0.0,
        (1, 2, 3): b123 * x[0] * x[1] * x[2],
    }
    if S not in table:
        raise UnsupportedCase(f"no closed form for S={S}")
    return float(table[S])


def _additive(case: OracleCase, S: tuple, x: np.ndarray) -> float:
    """Additive model: b and m effects for any distribution; c only with diagonal covariance."""
    a1, a2, a3 = case.beta
    if case.fanova_kind == "b":
        b = case.baseline
        center = (a1 * b[0], a2 * b[1] ** 2, a3 * b[2] ** 3)
    else:
        spec = case.spec
        if case.fanova_kind == "c" and not spec.is_diagonal():
            raise UnsupportedCase("c-fANOVA closed form for the additive model needs diagonal covariance")
        mu, var = spec.mu, np.diag(spec.sigma)
        center = (
            a1 * mu[0],
            a2 * (mu[1] ** 2 + var[1]),
            a3 * (mu[2] ** 3 + 3.0 * mu[2] * var[2]),
        )
    terms = (a1 * x[0], a2 * x[1] ** 2, a3 * x[2] ** 3)
    if S == ():
        return float(sum(center))
    if len(S) == 1:
        i = S[0] - 1
        if i == 3:
            return 0.0
        return float(terms[i] - center[i])
    if all(1 <= i <= 4 for i in S):
        return 0.0
    raise UnsupportedCase(f"no closed form for S={S}")


def naive_moebius(nu: GameTensor) -> GameTensor:
    """``m(S) = sum_{T subset S} (-1)^{|S|-|T|} nu(T)`` by a direct double loop over all pairs."""
    if nu.d > NAIVE_MAX_D:
        raise PreconditionError(f"naive Moebius is limited to d <= {NAIVE_MAX_D}")
    n = 1 << nu.d
    out = np.zeros(n)
    for S in range(n):
        s = bin(S).count("1")
        total = 0.0
        for T in range(n):
            if T & S == T:
                total += (-1.0) ** (s - bin(T).count("1")) * nu.values[T]
        out[S] = total
    return GameTensor(nu.d, out, nu.kind)


TABLE3_ROWS = [
    ("individual", "pure"), ("individual", "partial"), ("individual", "full"),
    ("joint", "pure"), ("joint", "partial"), ("joint", "full"),
    ("interaction", "pure"), ("interaction", "partial"), ("interaction", "full"),
]
TABLE3_COLUMNS = ("x1", "x2", "x1x2", "x1x2x3")


def table3_reference() -> np.ndarray:
    """9 x 4 weights of the effects (x1, x2, x1x2, x1x2x3) for target {1} or {1,2}.

    Rows follow ``TABLE3_ROWS``; the generalized-value weight for one outside
    feature is 1/2.
    """
    w = 0.5
    return np.array([
        [1, 0, 0, 0],
        [1, 0, 1 / 2, 1 / 3],
        [1, 0, 1, 1],
        [1, 1, 1, 0],
        [1, 1, 1, w],
        [1, 1, 1, 1],
        [0, 0, 1, 0],
        [0, 0, 1, w],
        [0, 0, 1, 1],
    ], dtype=float)


def equicorrelated_full_effect_lin(rho: float, d: int, beta, x=None) -> np.ndarray:
    """``nu(D) - nu(-i)`` for a linear model under c-fANOVA, zero mean, unit variances.

    With the all-ones point and equicorrelation ``rho`` the conditional mean of
    ``X_i`` given the other ``d - 1`` ones is ``(d-1) rho / (1 + (d-2) rho)``, so
    the full effect of feature ``i`` is ``beta_i`` times one minus that.
    """
    if d < 2:
        raise PreconditionError("need d >= 2")
    if not (-1.0 / (d - 1) < rho < 1.0):
        raise PreconditionError(f"rho={rho} does not give a valid correlation matrix for d={d}")
    beta = np.broadcast_to(np.asarray(beta, dtype=float), (d,))
    if x is None:
        shrink = (d - 1) * rho / (1.0 + (d - 2) * rho)
        return beta * (1.0 - shrink)
    # general point: E[X_i | X_-i = x_-i] = rho * sum(x_-i) / (1 + (d-2) rho)
    x = np.asarray(x, dtype=float)
    out = np.empty(d)
    for i in range(d):
        rest = np.delete(x, i).sum()
        out[i] = beta[i] * (x[i] - rho * rest / (1.0 + (d - 2) * rho))
    return out


def multilinear_baseline_effect(M: MonomialMap, S, x, b) -> float:
    """b-fANOVA effect of a multilinear polynomial.

    ``f_S(x) = sum_{L sup S} c_L prod_{i in S} (x_i - b_i) prod_{i in L minus S} b_i``.
    """
    if not is_multilinear(M):
        raise UnsupportedCase("the generic-effect formula needs a multilinear polynomial")
    S = set(_key(S))
    x = np.asarray(x, dtype=float)
    b = np.asarray(b, dtype=float)
    total = 0.0
    for kappa, c in M.terms.items():
        L = {i + 1 for i, k in enumerate(kappa) if k}
        if not S <= L:
            continue
        term = c
        for i in S:
            term *= x[i - 1] - b[i - 1]
        for i in L - S:
            term *= b[i - 1]
        total += term
    return float(total)
