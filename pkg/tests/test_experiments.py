import csv
import json

import numpy as np
import pytest

from fanova_games.coalitions import PreconditionError
from fanova_games.experiments import fig_sweep, individual_effects, lookup, reproduce, table3_computed
from fanova_games.oracle import table3_reference
from fanova_games.synthetic import synthetic_model, synthetic_spec


def test_table3_weights_match_reference():
    np.testing.assert_allclose(table3_computed(), table3_reference(), atol=1e-12)


def test_fig2_int_values():
    F = synthetic_model("int")
    eff = individual_effects(F, "conditional", synthetic_spec(0.9), np.ones(4))
    np.testing.assert_allclose(eff["pure"], [6.5, 6.5, 6.5, 6.372], atol=1e-9)
    np.testing.assert_allclose(eff["full"][3], 0.0, atol=1e-12)
    m = individual_effects(F, "marginal", synthetic_spec(0.9), np.ones(4))
    np.testing.assert_allclose(m["pure"], [2.0, 2.0, 2.9, 0.0], atol=1e-12)


def test_noise_feature_has_no_full_or_partial_effect_under_m():
    rows = fig_sweep("fig2_lin", repetitions=1)
    for rho in (0.0, 0.5, 0.9):
        for effect in ("partial", "full"):
            assert lookup(rows, rho, "marginal", effect, feature=4) == pytest.approx(0, abs=1e-12)


def test_monte_carlo_sweep_varies_with_seed(tmp_path):
    out = reproduce("fig2_lin", seed=1, out_dir=tmp_path, mode="monte_carlo", repetitions=3, mc_samples=64)
    rows = out["rows"]
    stds = [r["std"] for r in rows if r["imputer"] == "marginal" and r["effect"] == "pure"]
    assert max(stds) > 0
    exact = reproduce("fig2_lin", seed=1, out_dir=tmp_path / "e", repetitions=3)["rows"]
    assert max(r["std"] for r in exact) <= 1e-12


def test_files_written(tmp_path):
    reproduce("fig_add", out_dir=tmp_path, repetitions=2)
    with open(tmp_path / "fig_add.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 3 * 3 * 3 * 4
    plot = json.loads((tmp_path / "fig_add_plot.json").read_text())
    assert plot["meta"]["repetitions"] == 2 and set(plot["features"]) == {"x1", "x2", "x3", "x4"}


def test_unknown_experiment(tmp_path):
    with pytest.raises(PreconditionError):
        reproduce("fig9", out_dir=tmp_path)
    with pytest.raises(PreconditionError):
        reproduce("table3", out_dir=tmp_path, mode="fast")
