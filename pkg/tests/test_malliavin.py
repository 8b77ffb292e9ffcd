import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from antiwick import chaos as C
from antiwick.basis import L2Function, indicator, make_uniform_grid
from antiwick.malliavin import (
    annihilate,
    annihilate_multi,
    betas,
    derivative_field,
    iterated_pairing,
    multinomial,
    smoothness_norm_identity,
)

from conftest import chaos_pair, chaos_vectors, rel_close


def test_annihilate_examples():
    assert annihilate(C.xi(2, 0, 3), 0) == C.constant(1.0, 2, 3)
    assert len(annihilate(C.constant(2.0, 2, 3), 1)) == 0
    assert annihilate(C.basis_element((3, 1), 5), 0) == C.basis_element((2, 1), 5, 3.0)
    with pytest.raises(IndexError):
        annihilate(C.xi(2, 0, 3), 2)


def test_annihilate_exponential_is_eigen():
    g = make_uniform_grid(1.0, 3)
    f = L2Function(g, [0.5, -0.2, 0.9])
    E = C.stochastic_exponential(f, 8)
    lower = C.stochastic_exponential(f, 7)
    for i in range(3):
        D = annihilate(E, i)
        # orders up to N-1 are all retained after lowering
        assert C.ChaosVector(3, 8, dict(D.items())).allclose(
            C.ChaosVector(3, 8, {a: f.coeffs[i] * c for a, c in lower.items()})
        )


def test_derivative_field_examples():
    g = make_uniform_grid(1.0, 4)
    B = C.gaussian_of(indicator(g, 0.5), 3)
    field = derivative_field(B)
    assert [C.expectation(c) for c in field.components] == pytest.approx([0.5, 0.5, 0.0, 0.0])
    assert C.evaluate(field.at(g, 0.1), [0.0] * 4) == pytest.approx(1.0)
    assert C.evaluate(field.at(g, 0.7), [0.0] * 4) == 0.0
    assert all(len(c) == 0 for c in derivative_field(C.constant(1.0, 4, 3)).components)
    assert derivative_field(C.xi(4, 2, 3)).energy() == 1.0


@given(chaos_vectors(3, 6), st.integers(0, 2), st.integers(0, 2))
def test_annihilators_commute(X, i, j):
    assert annihilate(annihilate(X, i), j) == annihilate(annihilate(X, j), i)


@given(chaos_vectors(2, 5))
def test_annihilate_past_degree_vanishes(X):
    k = X.degree + 1
    assert len(annihilate_multi(X, [k, 0])) == 0
    assert len(annihilate_multi(X, [0, k])) == 0


def test_beta_enumeration():
    assert betas(2, [1, 1, 1]) == [(1, 1, 0), (1, 0, 1), (0, 1, 1)]
    assert betas(3, [1, 1]) == []
    assert sum(multinomial(b) for b in betas(3, [3, 3, 3])) == 27


def test_iterated_pairing_examples():
    x = C.xi(2, 0, 4)
    assert iterated_pairing(x, x, 1) == C.constant(1.0, 2, 4)
    X = C.basis_element((2, 1), 4)
    assert len(iterated_pairing(X, x, 2)) == 0
    with pytest.raises(ValueError):
        iterated_pairing(x, x, -1)


def test_iterated_pairing_of_exponentials():
    g = make_uniform_grid(1.0, 2)
    f = L2Function(g, [0.3, -0.4])
    h = L2Function(g, [0.5, 0.2])
    N = 12
    Ef, Eh = C.stochastic_exponential(f, N), C.stochastic_exponential(h, N)
    fh = float(f.coeffs @ h.coeffs)
    for n in range(3):
        got = iterated_pairing(Ef, Eh, n)
        want = C.pointwise_product(Ef, Eh) * fh**n
        # the top orders see less of the input series; compare the low ones
        low = lambda V: {a: c for a, c in V.items() if sum(a) <= N - 2 * n - 4}
        for a, c in low(want).items():
            assert got.coeff(a) == pytest.approx(c, rel=1e-6, abs=1e-9)


@given(chaos_pair(), st.integers(0, 3))
def test_pairing_symmetric(pair, n):
    X, Y = pair
    assert iterated_pairing(X, Y, n).allclose(iterated_pairing(Y, X, n))


@given(chaos_pair(), st.floats(-2, 2), st.integers(0, 2))
def test_pairing_bilinear(pair, s, n):
    X, Y = pair
    lhs = iterated_pairing(X * s + Y, Y, n)
    rhs = iterated_pairing(X, Y, n) * s + iterated_pairing(Y, Y, n)
    assert lhs.allclose(rhs, rtol=1e-9, atol=1e-9)


@pytest.mark.parametrize(
    "X, expected",
    [
        (C.xi(2, 0, 4), 2.0),
        (C.constant(-3.0, 2, 4), 9.0),
        (C.basis_element((2, 0), 4), 8.0),
    ],
)
def test_smoothness_identity_examples(X, expected):
    lhs, rhs = smoothness_norm_identity(X)
    assert lhs == pytest.approx(expected) and rhs == pytest.approx(expected)


@given(chaos_vectors(3, 8, max_terms=6))
def test_smoothness_identity_property(X):
    lhs, rhs = smoothness_norm_identity(X)
    assert rel_close(lhs, rhs, 1e-9)
