"""Reproduction of the synthetic local-explanation experiments.

``table3``  weight matrix of fANOVA effects for the three-feature example.
``fig2_*``  pure/partial/full individual effects of four equicorrelated
            features at ``x = (1, 1, 1, 1)`` under b-, m- and c-imputation.

Repetitions vary the imputer seed (background draw for marginal imputation,
per-point conditional draws for conditional imputation). In exact-moment mode
the effects do not depend on the seed, so the spread is zero.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Optional

import numpy as np

from .coalitions import PreconditionError
from .games import local_game
from .gaussian import GaussianSpec
from .influence import compute_effect
from .model import parse_model
from .oracle import TABLE3_COLUMNS, TABLE3_ROWS, table3_reference
from .synthetic import RHOS, synthetic_model, synthetic_spec
from .value_functions import ImputerConfig, ValueFunction

EXPERIMENTS = ("table3", "fig2_lin", "fig2_int", "fig_add")
EFFECT_ORDER = ("pure", "partial", "full")
IMPUTERS = ("baseline", "marginal", "conditional")
N_REPETITIONS = 30

_FIG_MODELS = {"fig2_lin": "lin", "fig2_int": "int", "fig_add": "add"}
_TABLE3_MONOMIALS = ("x1", "x2", "x1*x2", "x1*x2*x3")


def _targets(influence_type: str) -> tuple[int, ...]:
    return (1,) if influence_type == "individual" else (1, 2)


def table3_computed() -> np.ndarray:
    """Weights recovered by explaining each monomial of the example on its own.

    Effects are linear in the model, so the weight of a monomial in a cell is
    the cell's value for the game of that monomial alone at ``x = (1, 1, 1)``.
    """
    spec = GaussianSpec.standard(3)
    x0 = np.ones(3)
    W = np.zeros((len(TABLE3_ROWS), len(_TABLE3_MONOMIALS)))
    for j, text in enumerate(_TABLE3_MONOMIALS):
        vf = ValueFunction(parse_model(text, 3), ImputerConfig("m", background=spec, mode="exact_moments"))
        game = local_game(vf, x0)
        for r, (influence_type, effect) in enumerate(TABLE3_ROWS):
            W[r, j] = compute_effect(game, _bits(_targets(influence_type)), effect, influence_type)
    return W


def table3_effects() -> dict[tuple[str, str], float]:
    """The nine effect values of the full three-feature example at ``x = (1, 1, 1)``."""
    vf = ValueFunction(synthetic_model("3int"),
                       ImputerConfig("m", background=GaussianSpec.standard(3), mode="exact_moments"))
    game = local_game(vf, np.ones(3))
    return {
        (t, e): compute_effect(game, _bits(_targets(t)), e, t) for t, e in TABLE3_ROWS
    }


def _bits(features) -> int:
    return sum(1 << (i - 1) for i in features)


def _value_function(F, kind: str, spec: GaussianSpec, seed: int, mode: str,
                    mc_samples: int) -> ValueFunction:
    if kind == "baseline":
        if mode == "exact_moments":
            b = spec.mu
        else:
            # baseline = mean of the same background the marginal imputer uses
            b = ValueFunction(F, ImputerConfig("marginal", background=spec, mc_samples=mc_samples,
                                               seed=seed, mode="monte_carlo")).background.mean(axis=0)
        return ValueFunction(F, ImputerConfig("baseline", baseline=b))
    return ValueFunction(F, ImputerConfig(kind, background=spec, mc_samples=mc_samples,
                                          seed=seed, mode=mode))


def individual_effects(F, kind: str, spec: GaussianSpec, x0, seed: int = 0,
                       mode: str = "exact_moments", mc_samples: int = 512) -> dict:
    """``{effect: array of per-feature values}`` for pure, partial and full."""
    vf = _value_function(F, kind, spec, seed, mode, mc_samples)
    game = local_game(vf, np.asarray(x0, dtype=float))
    return {
        e: np.array([compute_effect(game, 1 << i, e, "individual") for i in range(F.d)])
        for e in EFFECT_ORDER
    }


def fig_sweep(name: str, seed: int = 0, repetitions: int = N_REPETITIONS,
              mode: str = "exact_moments", mc_samples: int = 512,
              rhos=RHOS) -> list[dict]:
    """Rows ``{rho, imputer, effect, feature, mean, std, values}`` for one model."""
    F = synthetic_model(_FIG_MODELS[name])
    x0 = np.ones(F.d)
    rows = []
    for rho in rhos:
        spec = synthetic_spec(rho, F.d)
        for kind in IMPUTERS:
            runs = [individual_effects(F, kind, spec, x0, seed + r, mode, mc_samples)
                    for r in range(repetitions)]
            for effect in EFFECT_ORDER:
                vals = np.array([run[effect] for run in runs])
                for i in range(F.d):
                    col = vals[:, i]
                    rows.append({
                        "rho": float(rho),
                        "imputer": kind,
                        "effect": effect,
                        "feature": i + 1,
                        "mean": float(col.mean()),
                        "std": float(col.std(ddof=1)) if repetitions > 1 else 0.0,
                        "values": col,
                    })
    return rows


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _fmt(v: float) -> str:
    return repr(float(v))


def reproduce(experiment: str, seed: int = 0, out_dir=".", mode: str = "exact_moments",
              repetitions: int = N_REPETITIONS, mc_samples: int = 512) -> dict:
    """Run one experiment, write its files to ``out_dir`` and return a summary.

    Raises:
        PreconditionError: unknown experiment tag or mode.
    """
    if experiment not in EXPERIMENTS:
        raise PreconditionError(f"unknown experiment {experiment!r}; expected one of {EXPERIMENTS}")
    if mode not in ("exact_moments", "monte_carlo"):
        raise PreconditionError(f"mode must be exact_moments or monte_carlo, got {mode!r}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    if experiment == "table3":
        W = table3_computed()
        R = table3_reference()
        dev = float(np.max(np.abs(W - R)))
        rows = []
        for r, (t, e) in enumerate(TABLE3_ROWS):
            for j, col in enumerate(TABLE3_COLUMNS):
                rows.append([t, e, col, _fmt(W[r, j]), _fmt(R[r, j]), _fmt(abs(W[r, j] - R[r, j]))])
        _write_csv(out / "table3.csv", ["type", "effect", "term", "computed", "reference", "abs_dev"], rows)
        values = table3_effects()
        summary = {
            "experiment": experiment,
            "max_abs_deviation": dev,
            "effects_at_ones": [
                {"type": t, "effect": e, "coalition": list(_targets(t)), "value": values[(t, e)]}
                for t, e in TABLE3_ROWS
            ],
            "files": ["table3.csv", "table3_summary.json"],
        }
        with open(out / "table3_summary.json", "w") as fh:
            json.dump(summary, fh, indent=2, sort_keys=True)
        return summary

    rows = fig_sweep(experiment, seed, repetitions, mode, mc_samples)
    _write_csv(
        out / f"{experiment}.csv",
        ["rho", "imputer", "effect", "feature", "mean", "std", "repetitions"],
        [[_fmt(r["rho"]), r["imputer"], r["effect"], r["feature"], _fmt(r["mean"]), _fmt(r["std"]),
          repetitions] for r in rows],
    )
    plot = {
        "title": f"{experiment}: individual effects at x = (1, 1, 1, 1)",
        "x_axis": "rho",
        "bars_per_feature": [f"{k}/{e}" for k in IMPUTERS for e in EFFECT_ORDER],
        "error_bars": "standard deviation over repetitions",
        "features": {},
    }
    for r in rows:
        feat = plot["features"].setdefault(f"x{r['feature']}", {})
        feat.setdefault(_fmt(r["rho"]), []).append(
            {"imputer": r["imputer"], "effect": r["effect"], "mean": r["mean"], "spread": r["std"]}
        )
    meta = {
        "experiment": experiment,
        "model": synthetic_model(_FIG_MODELS[experiment]).text,
        "x0": [1.0, 1.0, 1.0, 1.0],
        "rhos": list(RHOS),
        "repetitions": repetitions,
        "seed": seed,
        "mode": mode,
        "mc_samples": mc_samples if mode == "monte_carlo" else None,
        "seed_varies": "imputer randomness (background draw and conditional draws)",
        "baseline": "feature mean" if mode == "exact_moments" else "mean of the background sample",
    }
    plot["meta"] = meta
    with open(out / f"{experiment}_plot.json", "w") as fh:
        json.dump(plot, fh, indent=2, sort_keys=True)
    return {"experiment": experiment, "rows": rows, "meta": meta,
            "files": [f"{experiment}.csv", f"{experiment}_plot.json"]}


def lookup(rows: list[dict], rho: float, imputer: str, effect: str,
           feature: Optional[int] = None):
    """Mean values from ``fig_sweep`` rows, per feature or for one feature."""
    sel = [r for r in rows if r["rho"] == rho and r["imputer"] == imputer and r["effect"] == effect]
    sel.sort(key=lambda r: r["feature"])
    if feature is not None:
        return next(r["mean"] for r in sel if r["feature"] == feature)
    return np.array([r["mean"] for r in sel])
