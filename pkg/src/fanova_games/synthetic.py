"""Synthetic models and data: four equicorrelated Gaussian features, polynomial targets."""

from __future__ import annotations

import numpy as np

from .gaussian import Dataset, GaussianSpec, sample, stream
from .model import ModelExpr, evaluate, parse_model

NOISE_VARIANCE = 0.01
RHOS = (0.0, 0.5, 0.9)

MODELS = {
    "lin": ("2*x1 + 2*x2 + 2*x3", 4),
    "int": ("2*x1 + 2*x2 + 2*x3 + x1*x2 + x1*x2*x3", 4),
    "add": ("2*x1 + x2^2 + x3^3", 4),
    # three-feature example used for the local weight table
    "3int": ("x1 + x2 + x3 + x1*x2 + x1*x2*x3", 3),
}


def synthetic_model(name: str) -> ModelExpr:
    if name not in MODELS:
        raise KeyError(f"unknown synthetic model {name!r}; choose from {sorted(MODELS)}")
    text, d = MODELS[name]
    return parse_model(text, d)


def synthetic_spec(rho: float, d: int = 4) -> GaussianSpec:
    """Zero mean, unit variances, all correlations ``rho``."""
    return GaussianSpec.equicorrelated(d, rho)


def synthetic_dataset(F: ModelExpr, spec: GaussianSpec, n: int, seed: int,
                      noise_variance: float = NOISE_VARIANCE) -> Dataset:
    """``n`` draws of ``X`` with ``y = F(X) + eps``, ``eps ~ N(0, noise_variance)``."""
    X = sample(spec, n, seed, "data")
    eps = stream(seed, "noise").normal(0.0, np.sqrt(noise_variance), n)
    return Dataset(X, evaluate(F, X) + eps)
