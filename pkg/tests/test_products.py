import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from antiwick import chaos as C
from antiwick.basis import L2Function, indicator, make_uniform_grid, unit
from antiwick.malliavin import iterated_pairing
from antiwick.products import (
    PhiSeries,
    anti_wick_gamma,
    anti_wick_power,
    anti_wick_series,
    antiwick_to_wick,
    associativity_probe,
    circle_phi,
    exp_phi_product,
    l1_bound_check,
    wick_to_antiwick,
)

from conftest import chaos_pair, chaos_vectors


def xi_sq_plus(m, N, c):
    return C.ChaosVector(m, N, {C.unit_index(m, 0, 2): 1.0, (0,) * m: c})


# -- PhiSeries -----------------------------------------------------------------

def test_phi_series_requires_unit_constant():
    with pytest.raises(ValueError):
        PhiSeries((2.0, 1.0))
    with pytest.raises(ValueError):
        PhiSeries(())


def test_phi_exponential_tail_rule():
    phi = PhiSeries.exponential(1.0, radius=2.0)
    r, K = 2.0, phi.K
    assert r ** (K + 1) / math.factorial(K + 1) * math.exp(r) < 1e-15
    assert phi(2.0) == pytest.approx(math.exp(2.0), rel=1e-14)
    assert PhiSeries.exponential(-1.0, K=3).coeffs == (1.0, -1.0, 0.5, -1 / 6)


# -- anchors -------------------------------------------------------------------

@pytest.mark.parametrize("route", [anti_wick_series, anti_wick_gamma, wick_to_antiwick])
def test_antiwick_xi_squared(route):
    x = C.xi(2, 0, 4)
    assert route(x, x).allclose(xi_sq_plus(2, 4, 2.0), rtol=1e-14, atol=1e-15)


@pytest.mark.parametrize("route", [C.wick_product, antiwick_to_wick])
def test_wick_xi_squared(route):
    x = C.xi(2, 0, 4)
    assert route(x, x).allclose(xi_sq_plus(2, 4, 0.0), rtol=1e-14, atol=1e-15)


def test_brownian_antiwick_square():
    g = make_uniform_grid(1.0, 4)
    for t in (0.25, 0.5, 1.0):
        B = C.gaussian_of(indicator(g, t), 4)
        sq = anti_wick_series(B, B)
        assert sq.allclose(C.pointwise_product(B, B) + C.constant(t, 4, 4))
        assert C.expectation(sq) - C.expectation(C.pointwise_product(B, B)) == pytest.approx(t)


def test_exponential_product_rule():
    g = make_uniform_grid(1.0, 2)
    f, h = L2Function(g, [0.2, 0.3]), L2Function(g, [-0.4, 0.1])
    N = 14
    Ef, Eh = C.stochastic_exponential(f, N), C.stochastic_exponential(h, N)
    got = anti_wick_series(Ef, Eh)
    want = C.pointwise_product(Ef, Eh) * math.exp(float(f.coeffs @ h.coeffs))
    for a, c in want.items():
        if sum(a) <= 6:
            assert got.coeff(a) == pytest.approx(c, rel=1e-9, abs=1e-12)


# -- product family --------------------------------------------------------------

@given(chaos_pair())
def test_phi_one_and_neg_exp_embed(pair):
    X, Y = pair
    assert circle_phi(X, Y, PhiSeries.one()).allclose(C.pointwise_product(X, Y))
    assert circle_phi(X, Y, PhiSeries.exponential(-1.0, K=X.N)).allclose(C.wick_product(X, Y))


@given(chaos_vectors(2, 6), st.floats(-3, 3), st.lists(st.floats(-1, 1), min_size=1, max_size=4))
def test_phi_constant_factor(X, c, tail):
    phi = PhiSeries([1.0] + tail)
    assert circle_phi(X, C.constant(c, 2, 6), phi).allclose(X * c)
    assert anti_wick_gamma(X, C.constant(c, 2, 6)).allclose(X * c)


@given(chaos_pair(), st.lists(st.floats(-1, 1), min_size=0, max_size=4))
def test_phi_product_commutative(pair, tail):
    X, Y = pair
    phi = PhiSeries([1.0] + tail)
    assert circle_phi(X, Y, phi).allclose(circle_phi(Y, X, phi))


@given(chaos_pair(max_m=3, N=8))
def test_routes_agree(pair):
    X, Y = pair
    assert anti_wick_series(X, Y).allclose(anti_wick_gamma(X, Y))
    assert anti_wick_series(X, Y).allclose(exp_phi_product(X, Y, 1.0))


@given(chaos_pair(), st.sampled_from([-1.0, -0.5, 0.0, 0.5, 1.0, 2.0]))
def test_exp_phi_product_matches_series(pair, alpha):
    X, Y = pair
    phi = PhiSeries.exponential(alpha, K=X.N)
    assert exp_phi_product(X, Y, alpha).allclose(circle_phi(X, Y, phi), rtol=1e-9, atol=1e-9)


@given(chaos_vectors(2, 8, 2), chaos_vectors(2, 8, 1), chaos_vectors(2, 8, 1))
def test_antiwick_associative(X, Y, Z):
    lhs = anti_wick_series(anti_wick_series(X, Y), Z)
    rhs = anti_wick_series(X, anti_wick_series(Y, Z))
    assert lhs.allclose(rhs, rtol=1e-9, atol=1e-9)


def test_one_plus_x_is_not_associative():
    phi = PhiSeries.polynomial([1.0, 1.0])
    x = C.xi(1, 0, 8)
    X, Y, Z = x, x, C.pointwise_product(x, x)
    lhs = circle_phi(circle_phi(X, Y, phi), Z, phi)
    rhs = circle_phi(X, circle_phi(Y, Z, phi), phi)
    assert not lhs.allclose(rhs)


def test_antiwick_unit_and_expectation(rng):
    for _ in range(10):
        X = C.random_chaos(rng, 3, 8, 4)
        Y = C.random_chaos(rng, 3, 8, 4)
        assert anti_wick_series(X, C.constant(1.0, 3, 8)).allclose(X)
        e = sum(C.expectation(iterated_pairing(X, Y, n)) / math.factorial(n) for n in range(5))
        assert C.expectation(anti_wick_series(X, Y)) == pytest.approx(e, rel=1e-12, abs=1e-12)


def test_gamma_route_flags_over_budget():
    X = C.basis_element((3, 0), 3)
    assert anti_wick_gamma(X, C.xi(2, 0, 3)).truncated
    assert not anti_wick_gamma(C.xi(2, 0, 4), C.xi(2, 0, 4)).truncated


def test_anti_wick_power_matches_series():
    x = C.xi(1, 0, 6)
    cube = anti_wick_series(anti_wick_series(x, x), x)
    assert anti_wick_power(x, 3).allclose(cube)


# -- appendix conversions ----------------------------------------------------------

@given(chaos_pair(max_m=3, N=6))
def test_conversions_round_trip(pair):
    X, Y = pair
    assert wick_to_antiwick(X, Y).allclose(anti_wick_series(X, Y), rtol=1e-9, atol=1e-9)
    assert antiwick_to_wick(X, Y).allclose(C.wick_product(X, Y), rtol=1e-9, atol=1e-9)


def test_conversions_with_constant():
    X = C.ChaosVector(2, 6, {(1, 1): 2.0, (0, 2): -1.0})
    c = C.constant(3.0, 2, 6)
    assert wick_to_antiwick(X, c).allclose(X * 3.0)
    assert antiwick_to_wick(c, X).allclose(X * 3.0)


# -- probes and bounds ---------------------------------------------------------------

def test_probe_witness_and_exponentials():
    g = make_uniform_grid(1.0, 2)
    e0, e1 = unit(g, 0), unit(g, 1)
    assert associativity_probe(PhiSeries.polynomial([1.0, 1.0]), e0, e1, e0 + e1) == (3.0, 4.0)
    for alpha in (1.0, -1.0, 0.5):
        lhs, rhs = associativity_probe(PhiSeries.exponential(alpha, radius=2.0), e0, e1, e0 + e1)
        assert abs(lhs - rhs) <= 1e-12
        assert lhs == pytest.approx(math.exp(2 * alpha), rel=1e-13)


@given(st.lists(st.floats(-1, 1), min_size=6, max_size=6), st.floats(-1.5, 1.5))
def test_probe_exponential_any_triple(v, alpha):
    g = make_uniform_grid(1.0, 2)
    f, gg, h = (L2Function(g, v[k:k + 2]) for k in (0, 2, 4))
    lhs, rhs = associativity_probe(PhiSeries.exponential(alpha, radius=4.0), f, gg, h)
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_l1_bound_cases():
    x = C.xi(2, 0, 4)
    res = l1_bound_check(x, x, 100_000, 7)
    assert res.bound == pytest.approx(2.0)
    assert abs(res.mc_l1 - 2.0) <= 4 * res.stderr
    one = C.constant(1.0, 2, 4)
    res = l1_bound_check(one, one, 1000, 7)
    assert res.mc_l1 == 1.0 and res.bound == 1.0


def test_l1_bound_reproducible_and_block_invariant_seed():
    X = C.ChaosVector(2, 4, {(1, 1): 1.0, (0, 0): 0.5})
    a = l1_bound_check(X, X, 5000, 3, block_size=1024)
    b = l1_bound_check(X, X, 5000, 3, block_size=1024)
    assert a == b
    with pytest.raises(ValueError):
        l1_bound_check(X, X, 0, 3)


def test_l1_bound_random_degree_two(rng):
    for k in range(3):
        X = C.random_chaos(rng, 3, 6, 2)
        Y = C.random_chaos(rng, 3, 6, 2)
        res = l1_bound_check(X, Y, 50_000, k)
        assert res.mc_l1 <= res.bound + 3 * res.stderr
