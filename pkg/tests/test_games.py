import numpy as np
import pytest

from fanova_games.coalitions import PreconditionError, moebius_transform
from fanova_games.games import (
    Game,
    GameConfig,
    build_game,
    fanova_decomposition,
    local_game,
    risk_game,
    sensitivity_game,
)
from fanova_games.gaussian import Dataset, GaussianSpec, sample
from fanova_games.model import evaluate, parse_model
from fanova_games.synthetic import synthetic_dataset, synthetic_model
from fanova_games.value_functions import ImputerConfig, ValueFunction

F3INT = parse_model("x1 + x2 + x3 + x1*x2 + x1*x2*x3", 3)


def vf_for(F, kind="m", spec=None, **kw):
    spec = spec or GaussianSpec.standard(F.d)
    if kind == "b":
        return ValueFunction(F, ImputerConfig("b", baseline=kw.pop("baseline", spec.mu)))
    return ValueFunction(F, ImputerConfig(kind, background=spec, **kw))


def test_local_game_examples():
    nu = local_game(vf_for(F3INT), np.ones(3))
    assert nu.values[0] == pytest.approx(0, abs=1e-14)
    assert nu.values[0b001] == pytest.approx(1)
    assert nu.values[0b011] == pytest.approx(3)
    assert nu.values[0b111] == pytest.approx(5)
    x0 = np.array([0.3, -1.0, 2.0])
    const = local_game(vf_for(F3INT, "b", baseline=x0), x0)
    np.testing.assert_allclose(const.values, evaluate(F3INT, x0))
    lin = synthetic_model("lin")
    nu = local_game(vf_for(lin, "b", baseline=np.zeros(4)), np.ones(4))
    for S in range(16):
        assert nu.values[S] == 2 * bin(S & 0b0111).count("1")


def test_fanova_decomposition():
    b1, b2, b12 = 1.2, -0.4, 0.9
    F = parse_model(f"{b1}*x1 + {b2}*x2 + {b12}*x1*x2", 2)
    b = np.array([0.5, -1.5])
    x0 = np.array([2.0, 1.0])
    f = fanova_decomposition(local_game(vf_for(F, "b", baseline=b), x0))
    assert f[(1, 2)] == pytest.approx(b12 * (x0[0] - b[0]) * (x0[1] - b[1]), abs=1e-13)
    assert f.baseline_value + sum(v for _, v in f.items()) == pytest.approx(evaluate(F, x0))
    lin = parse_model(f"{b1}*x1 + {b2}*x2", 2)
    spec = GaussianSpec([0.0, 0.0], [[1.3, 0.5], [0.5, 0.8]])
    assert fanova_decomposition(local_game(vf_for(lin, "m", spec), x0))[(1, 2)] == pytest.approx(0, abs=1e-13)
    expected = -(x0[0] * b2 * 0.5 / 1.3 + x0[1] * b1 * 0.5 / 0.8)
    assert fanova_decomposition(local_game(vf_for(lin, "c", spec), x0))[(1, 2)] == pytest.approx(expected, abs=1e-13)
    with pytest.raises(PreconditionError):
        fanova_decomposition(sensitivity_game(vf_for(lin), (spec, 10, 0)))


def test_decomposition_sums_to_prediction(rng):
    F = synthetic_model("int")
    spec = GaussianSpec.equicorrelated(4, 0.5)
    for kind in ("b", "m", "c"):
        x0 = rng.normal(size=4)
        f = fanova_decomposition(local_game(vf_for(F, kind, spec), x0))
        assert f.baseline_value + sum(v for _, v in f.items()) == pytest.approx(evaluate(F, x0), abs=1e-10)


def test_sensitivity_game_examples():
    const = parse_model("3", 2)
    nu = sensitivity_game(vf_for(const), (GaussianSpec.standard(2), 50, 0))
    assert np.all(nu.values == 0)
    lin = synthetic_model("lin")
    n = 20000
    nu = sensitivity_game(vf_for(lin), (GaussianSpec.standard(4), n, 1))
    for S in (0b0001, 0b0011, 0b1111, 0b1000):
        target = 4 * bin(S & 0b0111).count("1")
        # variance of a sample variance of a normal: 2 sigma^4 / (n - 1)
        assert abs(nu.values[S] - target) <= 3 * np.sqrt(2 * target**2 / (n - 1)) + 1e-12
    with pytest.raises(PreconditionError):
        sensitivity_game(vf_for(lin), np.ones((1, 4)))


def test_sensitivity_game_2int():
    F = parse_model("2*x1 + 3*x2 + 1.5*x1*x2", 2)
    X = sample(GaussianSpec.standard(2), 50000, 3)
    nu = sensitivity_game(vf_for(F), X)
    assert nu.values[0b11] == pytest.approx(4 + 9 + 2.25, rel=0.03)
    assert nu.values[0b01] == pytest.approx(4, rel=0.03)


def test_risk_game():
    F = synthetic_model("int")
    spec = GaussianSpec.standard(4)
    X = sample(spec, 200, 0)
    perfect = Dataset(X, evaluate(F, X))
    nu = risk_game(vf_for(F, "m", spec), perfect)
    assert nu.values[-1] == 0.0
    assert np.all(nu.values[:-1] <= 0)
    # nu(empty) is the loss of a constant prediction
    pred = vf_for(F, "m", spec).batch(0, X)
    assert np.ptp(pred) < 1e-12
    assert nu.values[0] == pytest.approx(-np.mean((pred - perfect.y) ** 2))
    with pytest.raises(PreconditionError):
        risk_game(vf_for(F, "m", spec), Dataset(X, np.full(200, 0.5)), loss="log")
    with pytest.raises(PreconditionError):
        risk_game(vf_for(F, "m", spec), Dataset(X))


def test_risk_game_label_shift():
    F = synthetic_model("lin")
    G = parse_model("2*x1 + 2*x2 + 2*x3 + 5", 4)
    spec = GaussianSpec.equicorrelated(4, 0.3)
    data = synthetic_dataset(F, spec, 300, 2)
    shifted = Dataset(data.x, data.y + 5)
    a = risk_game(vf_for(F, "c", spec), data).values
    b = risk_game(vf_for(G, "c", spec), shifted).values
    np.testing.assert_allclose(a, b, atol=1e-10)


def test_log_loss():
    F = parse_model("0.25 + 0.5*x1", 1)
    data = Dataset(np.array([[0.0], [1.0]]), np.array([0.0, 1.0]))
    nu = risk_game(vf_for(F, "b", baseline=np.zeros(1)), data, loss="log")
    expected = -np.mean([-np.log(0.75), -np.log(0.75)])
    assert nu.values[1] == pytest.approx(expected)


def test_lazy_game_counts_evaluations():
    g = local_game(vf_for(F3INT), np.ones(3), lazy=True)
    assert isinstance(g, Game) and g.evaluations == 0
    g([1]); g([1]); g([1, 2])
    assert g.evaluations == 2
    calls = []
    g.to_tensor(progress=lambda k, n: calls.append((k, n)))
    assert calls[-1] == (8, 8)


def test_common_points_across_coalitions():
    F = synthetic_model("int")
    vf = vf_for(F, "m", GaussianSpec.equicorrelated(4, 0.5), mode="monte_carlo", mc_samples=64)
    nu = sensitivity_game(vf, (GaussianSpec.equicorrelated(4, 0.5), 100, 9))
    X = sample(GaussianSpec.equicorrelated(4, 0.5), 100, 9, "points")
    for S in (0b0001, 0b0110, 0b1111):
        assert nu.values[S] == pytest.approx(np.var(vf.batch(S, X), ddof=1))


def test_game_config():
    vf = vf_for(F3INT)
    with pytest.raises(PreconditionError):
        GameConfig("local", vf)
    with pytest.raises(PreconditionError):
        GameConfig("risk", vf, eval_points=(GaussianSpec.standard(3), 10, 0))
    g = build_game(GameConfig("local", vf, x0=np.ones(3)))
    assert g.value(0b111) == pytest.approx(5)
    m = moebius_transform(g.to_tensor()).values
    assert m[0b011] == pytest.approx(1)
