import random
from math import comb

import pytest
import sympy
from hypothesis import given, strategies as st

from froblift.fields import field
from froblift.polynomials import parse_poly, Poly
from froblift.witt_frobenius import (delta, det_poly, det_xi_charts, det_xi_divisor_Pn, FrobeniusLiftChart,
                                     int_to_witt, is_compatible_blowup_center,
                                     is_compatible_divisor, standard_lifts, teichmuller, theta_nu_roundtrip,
                                     W2Polynomial, w2_add, w2_mul, witt_to_int, WittError, WittScalar2,
                                     xi_matrix)

from conftest import from_sympy_terms, to_sympy


# --- W_2 of a finite field ---------------------------------------------------------------

@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_w2_fp_is_integers_mod_p_squared(p):
    # [DERIVED] oracle: integer arithmetic mod p^2
    F = field(p)
    for a in range(p * p):
        for b in range(p * p):
            x, y = int_to_witt(F, a), int_to_witt(F, b)
            assert witt_to_int(w2_add(x, y)) == (a + b) % (p * p)
            assert witt_to_int(w2_mul(x, y)) == (a * b) % (p * p)


def test_small_additions():
    # [TRIVIAL] 1 + 1 = 2 = p in W_2(F_2)
    F = field(2)
    s = w2_add(WittScalar2(F, 1, 0), WittScalar2(F, 1, 0))
    assert (s.a0, s.a1) == (0, 1)
    # in W_2(F_3) the Teichmueller lift of 2 is 8 = -1, so [1] + [2] = 0
    G = field(3)
    assert witt_to_int(teichmuller(G, 2)) == 8
    assert w2_add(WittScalar2(G, 1, 0), WittScalar2(G, 2, 0)).is_zero()


@given(a=st.integers(0, 80), b=st.integers(0, 80), c=st.integers(0, 80), d=st.integers(0, 80),
       q=st.sampled_from([4, 9, 25, 27]))
def test_w2_ring_axioms(a, b, c, d, q):
    F = field(q)
    x, y = WittScalar2(F, a % q, b % q), WittScalar2(F, c % q, d % q)
    z = WittScalar2(F, (a + c) % q, (b * d) % q)
    assert w2_add(x, y) == w2_add(y, x)
    assert w2_mul(x, w2_add(y, z)) == w2_add(w2_mul(x, y), w2_mul(x, z))
    assert w2_add(x, -x).is_zero()
    # Frobenius is a ring map and Teichmueller is multiplicative
    assert w2_mul(x, y).sigma() == w2_mul(x.sigma(), y.sigma())
    assert w2_mul(teichmuller(F, a % q), teichmuller(F, c % q)) == teichmuller(F, F.mul(a % q, c % q))


# --- delta and lifts ---------------------------------------------------------------------

@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_delta_of_sum_standard_lift(p):
    # [DERIVED] ((x^p + y^p) - (x + y)^p) / p by binomial coefficients
    F = field(p)
    V = ("x", "y")
    chart = FrobeniusLiftChart.standard(F, V)
    g = parse_poly("x + y", F, V)
    want = Poly(F, V, {(i, p - i): F.from_int(-comb(p, i) // p) for i in range(1, p)})
    assert delta(chart, g) == want


@given(seed=st.integers(0, 10 ** 6), p=st.sampled_from([2, 3, 5]))
def test_delta_shift_law(seed, p):
    rng = random.Random(seed)
    F = field(p)
    V = ("x", "y")
    chart = FrobeniusLiftChart([Poly.random(F, V, 2, 2, rng) for _ in V], V, F)
    g = Poly.random(F, V, 3, 3, rng)
    c = Poly.random(F, V, 2, 2, rng)
    lift = W2Polynomial.teichmuller_lift(g)
    assert delta(chart, g, lift + W2Polynomial.p_times(c)) == delta(chart, g, lift) + c ** p


def test_delta_rejects_wrong_lift():
    F = field(3)
    V = ("x",)
    chart = FrobeniusLiftChart.standard(F, V)
    with pytest.raises(WittError):
        delta(chart, parse_poly("x", F, V), W2Polynomial.teichmuller_lift(parse_poly("x+1", F, V)))


@given(seed=st.integers(0, 10 ** 6), p=st.sampled_from([2, 3, 5]))
def test_theta_nu_identities(seed, p):
    rng = random.Random(seed)
    F = field(p)
    V = ("x", "y")
    chart = FrobeniusLiftChart([Poly.random(F, V, 2, 2, rng) for _ in V], V, F)
    g = Poly.random(F, V, 3, 3, rng)
    lift = W2Polynomial.teichmuller_lift(g) + W2Polynomial.p_times(Poly.random(F, V, 2, 2, rng))
    theta_nu_roundtrip(chart, lift)
    theta_nu_roundtrip(chart, g, Poly.random(F, V, 2, 2, rng))


# --- xi ----------------------------------------------------------------------------------

@given(seed=st.integers(0, 10 ** 6), p=st.sampled_from([2, 3, 5]))
def test_det_xi_against_jacobian(seed, p):
    # [DERIVED] xi(dx_j) = x_j^(p-1) dx_j + d f_j, determinant by sympy
    rng = random.Random(seed)
    F = field(p)
    V = ("x", "y")
    fs = [Poly.random(F, V, 3, 3, rng) for _ in V]
    chart = FrobeniusLiftChart(fs, V, F)
    syms = sympy.symbols(V)
    exprs = [to_sympy(f).as_expr() if not f.is_zero() else 0 for f in fs]
    M = sympy.Matrix(2, 2, lambda j, i: (syms[j] ** (p - 1) if i == j else 0) + sympy.diff(exprs[j], syms[i]))
    want = from_sympy_terms(sympy.Poly(sympy.expand(M.det()), *syms, modulus=p))
    assert det_poly(xi_matrix(chart)).terms == want


@pytest.mark.parametrize("p", [2, 3, 5])
def test_xi_log_coordinates(p):
    # [TRIVIAL] standard lift: dlog x is fixed, dy scales by y^(p-1)
    F = field(p)
    V = ("x", "y")
    M = xi_matrix(FrobeniusLiftChart.standard(F, V), (0,))
    assert M[0][0] == Poly.const(F, V, 1)
    assert M[1][1] == Poly.var(F, V, 1) ** (p - 1)
    assert M[0][1].is_zero() and M[1][0].is_zero()


@pytest.mark.parametrize("p", [2, 3, 5, 7])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_det_xi_on_projective_space(p, n):
    # [PAPER] the standard lifting has det xi = (x_0 ... x_n)^(p-1) up to a scalar
    F = field(p)
    H = det_xi_divisor_Pn(p, n, standard_lifts(F, n))
    assert list(H.terms) == [(p - 1,) * (n + 1)]


def test_det_xi_nonstandard_lift_glues():
    F = field(3)
    X = ("x0", "x1")
    lifts = [parse_poly("x0^2*x1", F, X), Poly(F, X)]
    H = det_xi_divisor_Pn(3, 1, lifts)
    assert H.is_homogeneous(4)
    charts = det_xi_charts(3, 1, lifts)
    assert charts[0].scale(F.inv(charts[0].coeff(next(iter(H.terms))))) == \
        charts[1].scale(F.inv(charts[1].coeff(next(iter(H.terms)))))


def test_det_xi_rejects_bad_degree():
    F = field(3)
    X = ("x0", "x1")
    with pytest.raises(WittError):
        det_xi_divisor_Pn(3, 1, [parse_poly("x0", F, X), Poly(F, X)])


# --- compatibility -----------------------------------------------------------------------

@pytest.mark.parametrize("p", [2, 3, 5])
def test_coordinate_hyperplanes_compatible(p):
    F = field(p)
    V = ("x", "y")
    chart = FrobeniusLiftChart.standard(F, V)
    for h in ("x", "y", "x*y"):
        w = is_compatible_divisor(chart, parse_poly(h, F, V), fixed_lift=True)
        assert w and w.a.is_zero()


@pytest.mark.parametrize("p", [3, 5, 7])
def test_diagonal_not_compatible_with_standard_lift(p):
    F = field(p)
    V = ("x", "y")
    assert not is_compatible_divisor(FrobeniusLiftChart.standard(F, V), parse_poly("x - y", F, V))


@pytest.mark.parametrize("p", [2, 3, 5])
def test_compatibility_needs_lift_correction(p):
    # F(x) = x^p + p: the Teichmueller lift of x fails, x - p works
    F = field(p)
    V = ("x",)
    chart = FrobeniusLiftChart([Poly.const(F, V, 1)], V, F)
    h = parse_poly("x", F, V)
    assert not is_compatible_divisor(chart, h, fixed_lift=True)
    w = is_compatible_divisor(chart, h)
    assert w and w.a.is_zero() and w.c == Poly.const(F, V, F.neg(1))
    assert h.frobenius() * w.a == delta(chart, h) + w.c.frobenius()


@pytest.mark.parametrize("p", [3, 5])
def test_translated_line_not_compatible(p):
    # x^p + 1 = (x + 1)((x + 1)^(p-1) - ...) is not (x + 1)^p times a unit mod p^2
    F = field(p)
    V = ("x",)
    assert not is_compatible_divisor(FrobeniusLiftChart.standard(F, V), parse_poly("x + 1", F, V))


def test_blowup_center_compatibility():
    F = field(3)
    V = ("x", "y")
    assert is_compatible_blowup_center(FrobeniusLiftChart.standard(F, V), ["x", "y"])
    bent = FrobeniusLiftChart([parse_poly("y", F, V), Poly(F, V)], V, F)
    assert not is_compatible_blowup_center(bent, ["x", "y"])
    with pytest.raises(WittError):
        is_compatible_blowup_center(bent, ["w"])
