"""Value functions ``F_S``: the model with features outside ``S`` imputed.

Three imputers are supported:

* baseline:    ``F(x_S, b_{-S})``
* marginal:    ``E[F(x_S, X_{-S})]``
* conditional: ``E[F(X) | X_S = x_S]`` (Gaussian features)

Marginal and conditional expectations use either Monte Carlo over a shared
background sample or exact Gaussian moments of the monomial expansion.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .coalitions import Coalition, as_bits, bits_to_features
from .gaussian import (
    Dataset,
    GaussianSpec,
    cholesky_factor,
    conditional_map,
    hash_values,
    raw_moments,
    sample,
    stream,
    MAX_MOMENT_DEGREE,
)
from .model import ModelExpr, ModelResourceError, expand_monomials, evaluate

_KIND_ALIASES = {
    "b": "baseline",
    "baseline": "baseline",
    "m": "marginal",
    "marginal": "marginal",
    "c": "conditional",
    "conditional": "conditional",
}
_MODES = ("auto", "monte_carlo", "exact_moments")
_MAX_ROWS_PER_CHUNK = 1 << 20


class ImputerConfigError(ValueError):
    """Invalid imputer configuration."""


@dataclass
class ImputerConfig:
    """How features outside a coalition are filled in.

    ``kind`` accepts ``b``/``m``/``c`` shorthands. ``mode="auto"`` picks exact
    moments for polynomial models of degree <= 8 under a Gaussian background,
    and Monte Carlo otherwise.
    """

    kind: str
    baseline: Optional[np.ndarray] = None
    background: Union[Dataset, GaussianSpec, None] = None
    mc_samples: int = 512
    seed: int = 0
    mode: str = "auto"

    def __post_init__(self):
        if self.kind not in _KIND_ALIASES:
            raise ImputerConfigError(f"unknown imputer kind {self.kind!r}; expected b, m or c")
        self.kind = _KIND_ALIASES[self.kind]
        if self.mode not in _MODES:
            raise ImputerConfigError(f"unknown mode {self.mode!r}; expected one of {_MODES}")
        if self.baseline is not None:
            self.baseline = np.asarray(self.baseline, dtype=float)
        if self.mc_samples < 1:
            raise ImputerConfigError("mc_samples must be positive")


def _splice(X: np.ndarray, fill: np.ndarray, S_bits: int) -> np.ndarray:
    idx = [i - 1 for i in bits_to_features(S_bits)]
    out = np.array(np.broadcast_to(fill, X.shape), dtype=float)
    out[:, idx] = X[:, idx]
    return out


class ValueFunction:
    """Deterministic ``(S, x) -> F_S(x)`` for one model and imputer.

    ``model_calls`` counts the rows on which the model was evaluated.
    """

    def __init__(self, F: ModelExpr, config: ImputerConfig):
        self.F = F
        self.config = config
        self.d = F.d
        self.model_calls = 0
        self.degenerate_coalitions: set[int] = set()
        self._cache: dict = {}
        self._validate()

    # -- setup ---------------------------------------------------------------

    def _validate(self):
        cfg, d = self.config, self.d
        if cfg.kind == "baseline":
            if cfg.baseline is None or cfg.baseline.shape != (d,):
                raise ImputerConfigError(f"baseline imputer needs a baseline vector of length {d}")
            self.mode = "exact"
            return
        if cfg.background is None:
            raise ImputerConfigError(f"{cfg.kind} imputer needs a background distribution")
        if cfg.background.d != d:
            raise ImputerConfigError(f"background has {cfg.background.d} features, model has {d}")
        if cfg.kind == "conditional" and not isinstance(cfg.background, GaussianSpec):
            raise ImputerConfigError("conditional imputer requires a GaussianSpec background")
        exact_ok = isinstance(cfg.background, GaussianSpec)
        self.monomials = None
        if exact_ok:
            try:
                self.monomials = expand_monomials(self.F)
            except ModelResourceError:
                exact_ok = False
            else:
                exact_ok = self.monomials.degree <= MAX_MOMENT_DEGREE
        if cfg.mode == "exact_moments" and not exact_ok:
            raise ImputerConfigError(
                "exact_moments mode needs a Gaussian background and a polynomial of degree <= 8"
            )
        if cfg.mode == "monte_carlo" or (cfg.mode == "auto" and not exact_ok):
            self.mode = "monte_carlo"
        else:
            self.mode = "exact"
        if self.mode == "monte_carlo" and cfg.kind == "marginal":
            self.background = self._draw_background()

    def _draw_background(self) -> np.ndarray:
        cfg = self.config
        if isinstance(cfg.background, GaussianSpec):
            return sample(cfg.background, cfg.mc_samples, cfg.seed, "background")
        x = cfg.background.x
        if x.shape[0] > cfg.mc_samples:
            rows = stream(cfg.seed, "background-rows").choice(x.shape[0], cfg.mc_samples, replace=False)
            x = x[np.sort(rows)]
        return x

    # -- model ---------------------------------------------------------------

    def _model(self, X: np.ndarray) -> np.ndarray:
        self.model_calls += X.shape[0]
        return evaluate(self.F, X)

    # -- public --------------------------------------------------------------

    def __call__(self, S, x) -> float:
        bits = coalition_bits(S, self.d)
        return float(self.batch(bits, np.asarray(x, dtype=float)[None, :])[0])

    def batch(self, S_bits: int, X) -> np.ndarray:
        """``F_S`` at each row of ``X``."""
        return self.batch_with_se(S_bits, X)[0]

    def batch_with_se(self, S_bits: int, X) -> tuple[np.ndarray, Optional[np.ndarray]]:
        """``F_S`` at each row of ``X`` plus Monte Carlo standard errors (``None`` if exact)."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.d:
            raise ValueError(f"expected points with {self.d} coordinates, got shape {X.shape}")
        full = (1 << self.d) - 1
        if S_bits == full:
            return self._model(X), (None if self.mode == "exact" else np.zeros(X.shape[0]))
        kind = self.config.kind
        if kind == "baseline":
            return self._model(_splice(X, self.config.baseline, S_bits)), None
        if self.mode == "exact":
            if kind == "marginal":
                return self._marginal_exact(S_bits, X), None
            return self._conditional_exact(S_bits, X), None
        if kind == "marginal":
            return self._marginal_mc(S_bits, X)
        return self._conditional_mc(S_bits, X)

    # -- exact backends ------------------------------------------------------

    def _marginal_poly(self, S_bits: int) -> dict:
        key = ("marginal", S_bits)
        if key not in self._cache:
            spec = self.config.background
            rest = [i for i in range(self.d) if not S_bits >> i & 1]
            m_rest = spec.mu[rest][None, :]
            c_rest = spec.sigma[np.ix_(rest, rest)]
            moment_cache: dict = {}
            reduced: dict = {}
            for kappa, c in self.monomials.terms.items():
                k_rest = tuple(kappa[i] for i in rest)
                ex = raw_moments(m_rest, c_rest, k_rest, moment_cache)[0] if any(k_rest) else 1.0
                k_given = tuple(k if S_bits >> i & 1 else 0 for i, k in enumerate(kappa))
                reduced[k_given] = reduced.get(k_given, 0.0) + c * ex
            self._cache[key] = reduced
        return self._cache[key]

    def _marginal_exact(self, S_bits: int, X: np.ndarray) -> np.ndarray:
        out = np.zeros(X.shape[0])
        for kappa, c in self._marginal_poly(S_bits).items():
            term = np.full(X.shape[0], c)
            for i, k in enumerate(kappa):
                if k:
                    term = term * X[:, i] ** k
            out += term
        return out

    def _cmap(self, S_bits: int):
        key = ("cmap", S_bits)
        if key not in self._cache:
            cmap = conditional_map(self.config.background, S_bits, pseudo_inverse=True)
            if cmap.degenerate:
                self.degenerate_coalitions.add(S_bits)
            self._cache[key] = (cmap, {})
        return self._cache[key]

    def _conditional_exact(self, S_bits: int, X: np.ndarray) -> np.ndarray:
        cmap, moment_cache = self._cmap(S_bits)
        means = cmap.mean(X[:, cmap.given])
        out = np.zeros(X.shape[0])
        for kappa, c in self.monomials.terms.items():
            term = np.full(X.shape[0], c)
            for i in cmap.given:
                if kappa[i]:
                    term = term * X[:, i] ** kappa[i]
            k_rest = tuple(kappa[i] for i in cmap.rest)
            if any(k_rest):
                term = term * raw_moments(means, cmap.cov, k_rest, moment_cache)
            out += term
        return out

    # -- Monte Carlo backends ------------------------------------------------

    def _marginal_mc(self, S_bits: int, X: np.ndarray):
        B = self.background
        m, d = B.shape
        idx = [i - 1 for i in bits_to_features(S_bits)]
        chunk = max(1, _MAX_ROWS_PER_CHUNK // m)
        means, ses = [], []
        for start in range(0, X.shape[0], chunk):
            Xc = X[start : start + chunk]
            Z = np.array(np.broadcast_to(B, (Xc.shape[0], m, d)))
            Z[:, :, idx] = Xc[:, None, idx]
            vals = self._model(Z.reshape(-1, d)).reshape(Xc.shape[0], m)
            means.append(vals.mean(axis=1))
            ses.append(vals.std(axis=1, ddof=1) / np.sqrt(m) if m > 1 else np.zeros(Xc.shape[0]))
        return np.concatenate(means), np.concatenate(ses)

    def _conditional_mc(self, S_bits: int, X: np.ndarray):
        cmap, _ = self._cmap(S_bits)
        key = ("cchol", S_bits)
        if key not in self._cache:
            self._cache[key] = cholesky_factor(cmap.cov) if cmap.rest.size else np.zeros((0, 0))
        L = self._cache[key]
        m = self.config.mc_samples
        means = np.empty(X.shape[0])
        ses = np.empty(X.shape[0])
        cond_means = cmap.mean(X[:, cmap.given])
        for k in range(X.shape[0]):
            x_S = X[k, cmap.given]
            gen = stream(self.config.seed, "conditional", S_bits, hash_values(x_S))
            z = gen.standard_normal((m, cmap.rest.size))
            rows = np.repeat(X[k][None, :], m, axis=0)
            rows[:, cmap.rest] = cond_means[k] + z @ L.T
            vals = self._model(rows)
            means[k] = vals.mean()
            ses[k] = vals.std(ddof=1) / np.sqrt(m) if m > 1 else 0.0
        return means, ses


def make_value_function(F: ModelExpr, config: ImputerConfig) -> ValueFunction:
    """Closure ``(S, x) -> F_S(x)`` for ``config``; repeated calls are reproducible."""
    return ValueFunction(F, config)


def baseline_value(F: ModelExpr, S, x, b) -> float:
    """``F(x_S, b_{-S})``."""
    x = np.asarray(x, dtype=float)
    b = np.asarray(b, dtype=float)
    if x.shape != (F.d,) or b.shape != (F.d,):
        raise ValueError(f"x and b must have length {F.d}")
    return make_value_function(F, ImputerConfig("baseline", baseline=b))(S, x)


def marginal_value(F: ModelExpr, S, x, config: ImputerConfig) -> float:
    """``E[F(x_S, X_{-S})]`` under ``config.background``."""
    if config.kind != "marginal":
        config = ImputerConfig("marginal", config.baseline, config.background,
                               config.mc_samples, config.seed, config.mode)
    return make_value_function(F, config)(S, x)


def conditional_value(F: ModelExpr, S, x, config: ImputerConfig) -> float:
    """``E[F(X) | X_S = x_S]`` under the Gaussian ``config.background``."""
    if config.kind != "conditional":
        config = ImputerConfig("conditional", config.baseline, config.background,
                               config.mc_samples, config.seed, config.mode)
    return make_value_function(F, config)(S, x)


def coalition_bits(S, d: int) -> int:
    """Accept a bit pattern, ``Coalition`` or iterable of 1-based features."""
    if isinstance(S, (int, np.integer)):
        return int(S)
    if isinstance(S, Coalition):
        return S.bits
    return as_bits(S, d)
