import numpy as np
import pytest
from hypothesis import given, strategies as st

from fanova_games.coalitions import (
    Coalition,
    GameTensor,
    InteractionValues,
    PreconditionError,
    as_bits,
    co_moebius_transform,
    discrete_derivative,
    inverse_moebius,
    moebius_transform,
    popcount,
    subsets_of,
    submasks,
)
from fanova_games.oracle import naive_moebius

NU = GameTensor(2, np.array([0.0, 1.0, 1.0, 3.0]))


def tensors(max_d=8):
    return st.integers(1, max_d).flatmap(
        lambda d: st.lists(
            st.floats(-10, 10, allow_nan=False), min_size=1 << d, max_size=1 << d
        ).map(lambda v, d=d: GameTensor(d, np.array(v)))
    )


def test_subsets_of_examples():
    assert subsets_of(Coalition.empty(3)) == [Coalition.empty(3)]
    assert [s.features for s in subsets_of(Coalition.from_features([1, 2], 2))] == [
        (), (1,), (2,), (1, 2)
    ]
    assert len(subsets_of(Coalition.grand(3))) == 8


@given(st.integers(0, 2**10 - 1))
def test_subsets_ascending_and_unique(bits):
    subs = [s.bits for s in subsets_of(Coalition(bits, 10))]
    assert subs == sorted(set(subs))
    assert len(subs) == 2 ** popcount(bits)
    assert all(s & bits == s for s in subs)


def test_coalition_invariants():
    S = Coalition.from_features([1, 3], 4)
    c = S.complement()
    assert len(c) == 2 and (c & S).bits == 0
    assert repr(S) == "{1,3}"
    with pytest.raises(ValueError):
        Coalition(1 << 4, 4)
    with pytest.raises(ValueError):
        Coalition.from_features([5], 4)


def test_as_bits_rejects_bare_int():
    with pytest.raises(TypeError):
        as_bits(3, 2)


def test_moebius_examples():
    np.testing.assert_array_equal(moebius_transform(NU).values, [0, 1, 1, 1])
    const = GameTensor(3, np.full(8, 2.5))
    m = moebius_transform(const).values
    assert m[0] == 2.5 and np.all(m[1:] == 0)


def test_moebius_3int_local_game():
    # nu(T) = sum of monomials of x1+x2+x3+x1x2+x1x2x3 inside T at x = 1
    mons = {0b001: 1, 0b010: 1, 0b100: 1, 0b011: 1, 0b111: 1}
    nu = np.array([sum(v for k, v in mons.items() if k & T == k) for T in range(8)], float)
    m = moebius_transform(GameTensor(3, nu)).values
    np.testing.assert_allclose(m, [0, 1, 1, 1, 1, 0, 0, 1], atol=1e-15)
    assert co_moebius_transform(GameTensor(3, nu)).values[0b001] == pytest.approx(3)


def test_co_moebius_examples():
    cm = co_moebius_transform(NU).values
    assert cm[0b01] == 2
    assert cm[0] == NU.values[-1]


def test_discrete_derivative_examples():
    assert discrete_derivative(NU, [1], []) == 1
    assert discrete_derivative(NU, [1, 2], []) == 1
    with pytest.raises(PreconditionError):
        discrete_derivative(NU, [1], [1, 2])


@given(tensors(10))
def test_round_trip(nu):
    back = inverse_moebius(moebius_transform(nu)).values
    np.testing.assert_allclose(back, nu.values, atol=1e-12 * (1 + np.abs(nu.values).max()) * 2**nu.d)


@given(tensors(8))
def test_moebius_is_derivative_at_empty(nu):
    m = moebius_transform(nu).values
    for S in range(1 << nu.d):
        assert discrete_derivative(nu, Coalition(S, nu.d), Coalition(0, nu.d)) == pytest.approx(m[S], abs=1e-9)


@given(tensors(8))
def test_co_moebius_is_derivative_at_complement(nu):
    cm = co_moebius_transform(nu).values
    m = moebius_transform(nu).values
    full = (1 << nu.d) - 1
    for S in range(1 << nu.d):
        via_deriv = discrete_derivative(nu, Coalition(S, nu.d), Coalition(full ^ S, nu.d))
        via_sum = sum(m[T] for T in range(1 << nu.d) if T & S == S)
        assert cm[S] == pytest.approx(via_deriv, abs=1e-9)
        assert cm[S] == pytest.approx(via_sum, abs=1e-9)


@given(st.integers(0, 10).flatmap(lambda s: st.tuples(st.just(s), st.integers(0, 2**s - 1))))
def test_inclusion_exclusion(args):
    s, L = args
    S = (1 << s) - 1
    total = sum((-1) ** (s - popcount(T)) for T in submasks(S) if T & L == L)
    assert total == (1 if L == S else 0)


def test_naive_moebius_differential(rng):
    for _ in range(100):
        nu = GameTensor(8, rng.normal(size=256))
        np.testing.assert_allclose(naive_moebius(nu).values, moebius_transform(nu).values, atol=1e-12)


def test_naive_moebius_examples():
    np.testing.assert_array_equal(naive_moebius(NU).values, [0, 1, 1, 1])
    assert np.all(naive_moebius(GameTensor(3, np.zeros(8))).values == 0)
    with pytest.raises(PreconditionError):
        naive_moebius(GameTensor(13, np.zeros(2**13)))


def test_game_tensor_validation():
    with pytest.raises(ValueError):
        GameTensor(2, np.zeros(3))
    with pytest.raises(ValueError):
        GameTensor(1, np.array([0.0, np.inf]))


def test_interaction_values_invariants():
    with pytest.raises(ValueError):
        InteractionValues({(1, 2): 1.0}, "sv", 1, 2)
    with pytest.raises(ValueError):
        InteractionValues({(1, 2): 1.0}, "moebius", 1, 2)
    iv = InteractionValues({(1, 2): 3.0, (2,): 1.0, (1,): 2.0}, "moebius", 2, 2)
    assert [k for k, _ in iv.items()] == [(1,), (2,), (1, 2)]
