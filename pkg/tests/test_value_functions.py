import numpy as np
import pytest

from fanova_games.gaussian import Dataset, GaussianSpec
from fanova_games.model import evaluate, parse_model
from fanova_games.value_functions import (
    ImputerConfig,
    ImputerConfigError,
    baseline_value,
    conditional_value,
    make_value_function,
    marginal_value,
)

B1, B2, B12 = 1.5, -0.7, 2.0
F2INT = parse_model(f"{B1}*x1 + {B2}*x2 + {B12}*x1*x2", 2)
F3INT = parse_model("x1 + x2 + x3 + x1*x2 + x1*x2*x3", 3)


def test_baseline_examples():
    x, b = np.array([0.3, 1.2]), np.array([-1.0, 2.0])
    assert baseline_value(F2INT, [1, 2], x, b) == pytest.approx(evaluate(F2INT, x))
    assert baseline_value(F2INT, [], x, b) == pytest.approx(evaluate(F2INT, b))
    expected = B1 * x[0] + B2 * b[1] + B12 * x[0] * b[1]
    assert baseline_value(F2INT, [1], x, b) == pytest.approx(expected, abs=1e-14)
    with pytest.raises(ValueError):
        baseline_value(F2INT, [1], x, b[:1])


def test_marginal_examples():
    F = parse_model("2*x1 + 3*x2 - x3", 3)
    cfg = ImputerConfig("m", background=GaussianSpec.standard(3))
    x = np.array([0.4, -1.1, 2.0])
    assert marginal_value(F, [1, 3], x, cfg) == pytest.approx(2 * 0.4 - 2.0, abs=1e-14)
    spec = GaussianSpec.equicorrelated(2, 0.6)
    mcfg = ImputerConfig("m", background=spec)
    assert marginal_value(F2INT, [1, 2], x[:2], mcfg) == pytest.approx(evaluate(F2INT, x[:2]))
    assert marginal_value(F2INT, [], x[:2], mcfg) == pytest.approx(B12 * 0.6, abs=1e-14)


def test_conditional_examples():
    rho = 0.6
    spec = GaussianSpec([0.0, 0.0], [[2.0, rho], [rho, 1.0]])
    cfg = ImputerConfig("c", background=spec)
    F = parse_model(f"{B1}*x1 + {B2}*x2", 2)
    x = np.array([0.8, -0.4])
    assert conditional_value(F, [1], x, cfg) == pytest.approx(B1 * 0.8 + 0.8 * B2 * rho / 2.0, abs=1e-14)
    assert conditional_value(F2INT, [], x, cfg) == pytest.approx(B12 * rho, abs=1e-14)
    ind = GaussianSpec([0.3, -0.2], np.diag([1.5, 0.5]))
    for S in ([], [1], [2], [1, 2]):
        assert conditional_value(F2INT, S, x, ImputerConfig("c", background=ind)) == pytest.approx(
            marginal_value(F2INT, S, x, ImputerConfig("m", background=ind)), abs=1e-12
        )


def test_exact_marginal_3int():
    vf = make_value_function(F3INT, ImputerConfig("m", background=GaussianSpec.standard(3)))
    assert vf.mode == "exact"
    assert vf([1, 2], np.ones(3)) == pytest.approx(3.0, abs=1e-14)


def test_single_row_background_is_baseline():
    r = np.array([0.5, -2.0])
    vf = make_value_function(F2INT, ImputerConfig("m", background=Dataset(r[None, :])))
    x = np.array([1.0, 3.0])
    for S in ([], [1], [2], [1, 2]):
        assert vf(S, x) == pytest.approx(baseline_value(F2INT, S, x, r), abs=1e-14)


def test_anchors():
    spec = GaussianSpec.equicorrelated(3, 0.4)
    X = np.random.default_rng(0).normal(size=(5, 3))
    for kind in ("b", "m", "c"):
        for mode in ("exact_moments", "monte_carlo"):
            cfg = ImputerConfig(kind, baseline=np.zeros(3), background=None if kind == "b" else spec,
                                mc_samples=64, mode=mode if kind != "b" else "auto")
            vf = make_value_function(F3INT, cfg)
            np.testing.assert_allclose(vf.batch(0b111, X), evaluate(F3INT, X))
            empty = vf.batch(0, X)
            if kind != "c" or mode == "exact_moments":
                assert np.ptp(empty) < 1e-12


def test_monte_carlo_is_reproducible():
    spec = GaussianSpec.equicorrelated(3, 0.5)
    for kind in ("m", "c"):
        cfg = ImputerConfig(kind, background=spec, mc_samples=128, seed=5, mode="monte_carlo")
        a = make_value_function(F3INT, cfg)([1], [0.2, 0.4, -0.1])
        b = make_value_function(F3INT, cfg)([1], [0.2, 0.4, -0.1])
        assert a == b
        other = ImputerConfig(kind, background=spec, mc_samples=128, seed=6, mode="monte_carlo")
        assert make_value_function(F3INT, other)([1], [0.2, 0.4, -0.1]) != a


def test_conditional_mc_close_to_exact():
    spec = GaussianSpec.equicorrelated(3, 0.7)
    x = np.array([0.5, -0.3, 1.2])
    exact = make_value_function(F3INT, ImputerConfig("c", background=spec))
    mc = make_value_function(F3INT, ImputerConfig("c", background=spec, mc_samples=20000, mode="monte_carlo"))
    for S in range(8):
        mean, se = mc.batch_with_se(S, x[None, :])
        assert abs(mean[0] - exact.batch(S, x[None, :])[0]) <= 5 * max(se[0], 1e-12)


def test_model_call_counter():
    vf = make_value_function(F3INT, ImputerConfig("b", baseline=np.zeros(3)))
    vf.batch(0b001, np.ones((4, 3)))
    assert vf.model_calls == 4
    mc = make_value_function(F3INT, ImputerConfig("m", background=GaussianSpec.standard(3),
                                                  mc_samples=10, mode="monte_carlo"))
    mc.batch(0b001, np.ones((4, 3)))
    assert mc.model_calls == 40


def test_config_errors():
    with pytest.raises(ImputerConfigError):
        ImputerConfig("q")
    with pytest.raises(ImputerConfigError):
        make_value_function(F2INT, ImputerConfig("b"))
    with pytest.raises(ImputerConfigError):
        make_value_function(F2INT, ImputerConfig("m"))
    with pytest.raises(ImputerConfigError):
        make_value_function(F2INT, ImputerConfig("c", background=Dataset(np.zeros((3, 2)))))
    high = parse_model("x1^9", 1)
    with pytest.raises(ImputerConfigError):
        make_value_function(high, ImputerConfig("m", background=GaussianSpec.standard(1), mode="exact_moments"))
    auto = make_value_function(high, ImputerConfig("m", background=GaussianSpec.standard(1)))
    assert auto.mode == "monte_carlo"


def test_degenerate_conditioning_is_flagged():
    spec = GaussianSpec(np.zeros(3), np.ones((3, 3)))
    vf = make_value_function(parse_model("x1 + x2 + x3", 3), ImputerConfig("c", background=spec))
    assert vf([1, 2], [1.0, 1.0, 1.0]) == pytest.approx(3.0)
    assert 0b011 in vf.degenerate_coalitions
