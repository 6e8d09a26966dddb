import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fanova_games.coalitions import GameTensor, PreconditionError, moebius_transform
from fanova_games.games import fanova_decomposition, local_game
from fanova_games.gaussian import GaussianSpec
from fanova_games.model import parse_model, expand_monomials
from fanova_games.oracle import (
    OracleCase,
    UnsupportedCase,
    closed_form_effect,
    equicorrelated_full_effect_lin,
    multilinear_baseline_effect,
    naive_moebius,
    table3_reference,
)
from fanova_games.value_functions import ImputerConfig, ValueFunction

LATTICE = np.linspace(-2, 2, 5)


def random_spec(rng, d):
    A = rng.normal(size=(d, d))
    return GaussianSpec(rng.normal(size=d), A @ A.T + 0.3 * np.eye(d))


def computed(case, x):
    F = parse_model(case.model_text(), case.d)
    if case.fanova_kind == "b":
        cfg = ImputerConfig("b", baseline=case.baseline)
    else:
        cfg = ImputerConfig(case.fanova_kind, background=case.spec, mode="exact_moments")
    local = local_game(ValueFunction(F, cfg), x)
    return fanova_decomposition(local)


@pytest.mark.parametrize("family", ["lin", "2int"])
@pytest.mark.parametrize("kind", ["b", "m", "c"])
def test_bivariate_closed_forms(family, kind, rng):
    for _ in range(3):
        beta = rng.normal(size=2 if family == "lin" else 3)
        spec = random_spec(rng, 2)
        case = OracleCase(family, kind, beta, baseline=rng.normal(size=2), spec=spec)
        for x in itertools.product(LATTICE, LATTICE):
            x = np.array(x)
            dec = computed(case, x)
            assert closed_form_effect(case, (), x) == pytest.approx(dec.baseline_value, abs=1e-9)
            for S in [(1,), (2,), (1, 2)]:
                assert closed_form_effect(case, S, x) == pytest.approx(dec[S], abs=1e-9)


@pytest.mark.parametrize("kind", ["b", "m", "c"])
def test_three_way_and_additive(kind, rng):
    case3 = OracleCase("3int", kind, rng.normal(size=5), baseline=np.zeros(3),
                       spec=GaussianSpec.standard(3))
    x = rng.normal(size=3)
    dec = computed(case3, x)
    for S in itertools.chain.from_iterable(itertools.combinations((1, 2, 3), r) for r in (1, 2, 3)):
        assert closed_form_effect(case3, S, x) == pytest.approx(dec[S], abs=1e-10)
    spec = GaussianSpec(rng.normal(size=4), np.diag(rng.uniform(0.5, 2, size=4)))
    case_add = OracleCase("add", kind, rng.normal(size=3), baseline=rng.normal(size=4), spec=spec)
    x = rng.normal(size=4)
    dec = computed(case_add, x)
    assert closed_form_effect(case_add, (), x) == pytest.approx(dec.baseline_value, abs=1e-10)
    for S in [(1,), (2,), (3,), (4,), (1, 2), (2, 4), (1, 2, 3)]:
        assert closed_form_effect(case_add, S, x) == pytest.approx(dec[S], abs=1e-10)


def test_unsupported_cases(rng):
    corr = GaussianSpec.equicorrelated(3, 0.5)
    with pytest.raises(UnsupportedCase):
        closed_form_effect(OracleCase("3int", "m", np.ones(5), spec=corr), (1,), np.ones(3))
    with pytest.raises(UnsupportedCase):
        closed_form_effect(OracleCase("add", "c", np.ones(3), spec=GaussianSpec.equicorrelated(4, 0.5)),
                           (1,), np.ones(4))
    with pytest.raises(PreconditionError):
        OracleCase("lin", "b", np.ones(2))
    with pytest.raises(PreconditionError):
        OracleCase("lin", "m", np.ones(3), spec=GaussianSpec.standard(2))
    with pytest.raises(PreconditionError):
        OracleCase("quad", "m", np.ones(2), spec=GaussianSpec.standard(2))


def test_oracle_examples():
    b = OracleCase("lin", "b", [2, 3], baseline=[0, 0])
    assert closed_form_effect(b, (1,), [1, 5]) == 2
    m = OracleCase("2int", "m", [0, 0, 1], spec=GaussianSpec(np.zeros(2), np.array([[1, 0.5], [0.5, 1]])))
    # E[X1 X2] = 0.5 is the constant term; interaction absorbs it back
    assert closed_form_effect(m, (), [1, 1]) == pytest.approx(0.5)
    assert closed_form_effect(m, (1, 2), [1, 1]) == pytest.approx(1.5)


def test_multilinear_baseline(rng):
    F = parse_model("3*x1*x2 - x2*x3 + 0.5*x1*x2*x3 + x4 - 2", 4)
    M = expand_monomials(F)
    for _ in range(5):
        x, b = rng.normal(size=4), rng.normal(size=4)
        dec = fanova_decomposition(local_game(ValueFunction(F, ImputerConfig("b", baseline=b)), x))
        for r in range(1, 5):
            for S in itertools.combinations(range(1, 5), r):
                assert multilinear_baseline_effect(M, S, x, b) == pytest.approx(dec[S], abs=1e-12)
    with pytest.raises(UnsupportedCase):
        multilinear_baseline_effect(expand_monomials(parse_model("x1^2", 1)), (1,), [1.0], [0.0])


@given(st.integers(1, 7), st.integers(0, 2**32 - 1))
def test_naive_moebius_matches_butterfly(d, seed):
    nu = GameTensor(d, np.random.default_rng(seed).normal(size=1 << d))
    np.testing.assert_allclose(naive_moebius(nu).values, moebius_transform(nu).values, atol=1e-12)


def test_table3_reference_shape():
    R = table3_reference()
    assert R.shape == (9, 4)
    # full effects carry every monomial containing the target
    np.testing.assert_array_equal(R[2], [1, 0, 1, 1])
    np.testing.assert_array_equal(R[8], [0, 0, 1, 1])


def test_equicorrelated_full_effect():
    np.testing.assert_allclose(equicorrelated_full_effect_lin(0.9, 4, 2.0)[:3], 0.0714286, atol=1e-6)
    np.testing.assert_allclose(equicorrelated_full_effect_lin(0.0, 4, [1, 2, 3, 4]), [1, 2, 3, 4])
    assert np.all(np.abs(equicorrelated_full_effect_lin(1 - 1e-9, 4, 2.0)) < 1e-7)
    with pytest.raises(PreconditionError):
        equicorrelated_full_effect_lin(1.0, 4, 2.0)
    x = np.array([0.3, -1.0, 2.0, 0.5])
    spec = GaussianSpec.equicorrelated(4, 0.5)
    F = parse_model("2*x1 + 2*x2 + 2*x3 + 2*x4", 4)
    nu = local_game(ValueFunction(F, ImputerConfig("c", background=spec, mode="exact_moments")), x)
    expected = [nu.values[-1] - nu.values[15 & ~(1 << i)] for i in range(4)]
    np.testing.assert_allclose(equicorrelated_full_effect_lin(0.5, 4, 2.0, x), expected, atol=1e-12)
