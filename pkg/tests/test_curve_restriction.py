import itertools
import random

import pytest
from hypothesis import given, strategies as st

from froblift.curve_restriction import (BundleError, bundle_splitting_type, conic_tangent_example,
                                        etale_fixed_scheme_check, LaurentTransitionMatrix, nef_obstruction,
                                        predicted_count, restrict_log_cotangent, RestrictionError,
                                        SemilinearError, SemilinearMap, semilinear_fixed_points,
                                        splitting_degree, splitting_type, stabilized_fixed_points,
                                        transition_from_json)
from froblift.extfield import rank_mod_p
from froblift.fields import field
from froblift.laurent import Laurent
from froblift.polynomials import parse_poly

# --- Laurent matrix helpers -------------------------------------------------------------


def _elementary(F, r, i, j, entry):
    rows = [[Laurent.const(F, 1) if a == b else Laurent(F) for b in range(r)] for a in range(r)]
    rows[i][j] = entry
    return LaurentTransitionMatrix(F, rows)


def _random_factorised(rng, F, a, steps=4):
    """``U(t) diag(t^a) C(1/t)`` with random elementary U over k[t] and C over k[1/t]."""
    r = len(a)
    M = LaurentTransitionMatrix.diagonal(F, a)
    for _ in range(steps):
        i, j = rng.sample(range(r), 2)
        M = _elementary(F, r, i, j, Laurent.monomial(F, rng.randint(0, 2), rng.randrange(1, F.q))) @ M
        i, j = rng.sample(range(r), 2)
        M = M @ _elementary(F, r, i, j, Laurent.monomial(F, -rng.randint(0, 2), rng.randrange(1, F.q)))
    return M


def _adjugate(M):
    r = M.r
    F = M.F
    if r == 1:
        return [[Laurent.const(F, 1)]]
    out = [[None] * r for _ in range(r)]
    for i in range(r):
        for j in range(r):
            minor = [[M.rows[a][b] for b in range(r) if b != j] for a in range(r) if a != i]
            d = LaurentTransitionMatrix(F, minor).det()
            out[j][i] = d if (i + j) % 2 == 0 else -d
    return out


def _h0(M):
    """Dimension of ``{f in k[t]^r : f M^{-1} in k[1/t]^r}`` by plain linear algebra."""
    F, r = M.F, M.r
    det = M.det()
    e = det.degree()
    adj = _adjugate(M)
    top = max(0, max((x.degree() for row in M.rows for x in row if not x.is_zero()), default=0))
    unknowns = [(i, k) for i in range(r) for k in range(top + 1)]
    # coefficient of t^j (j > e) in (f adj)_col must vanish
    eqs = {}
    for col in range(r):
        for u, (i, k) in enumerate(unknowns):
            for ex, c in adj[i][col].terms.items():
                if ex + k > e:
                    eqs.setdefault((col, ex + k), [0] * len(unknowns))[u] = c
    assert F.k == 1
    rows = list(eqs.values())
    rank = rank_mod_p(rows, F.p) if rows else 0
    return len(unknowns) - rank


# --- splitting types -----------------------------------------------------------------------

@given(seed=st.integers(0, 10 ** 6), a=st.lists(st.integers(-3, 3), min_size=2, max_size=3))
def test_splitting_type_recovers_construction(seed, a):
    rng = random.Random(seed)
    F = field(5)
    M = _random_factorised(rng, F, a)
    assert splitting_type(M) == sorted(a, reverse=True)


@given(seed=st.integers(0, 10 ** 6), a=st.lists(st.integers(-2, 2), min_size=2, max_size=3))
def test_bundle_type_matches_section_count(seed, a):
    rng = random.Random(seed)
    F = field(3)
    M = _random_factorised(rng, F, a, steps=3)
    b = bundle_splitting_type(M)
    for k in range(-3, 4):
        twisted = LaurentTransitionMatrix(F, [[x.shift(k) for x in row] for row in M.rows])
        assert _h0(twisted) == sum(max(0, bi + k + 1) for bi in b)


def test_diagonal_and_scalar_cases():
    F = field(7)
    assert splitting_type(LaurentTransitionMatrix.diagonal(F, [2, -1, 0])) == [2, 0, -1]
    M = LaurentTransitionMatrix.from_lists(F, [["t^2", "1"], ["0", "t^-1"]])
    assert splitting_type(M) == [2, -1]
    assert sum(splitting_type(M)) == M.det().degree()


def test_non_invertible_rejected():
    F = field(5)
    with pytest.raises(BundleError):
        splitting_type(LaurentTransitionMatrix.from_lists(F, [["t + 1"]]))
    with pytest.raises(BundleError):
        LaurentTransitionMatrix.from_lists(F, [["t", 1.5]])
    with pytest.raises(BundleError):
        LaurentTransitionMatrix(F, [[Laurent(F)], []])


def test_json_roundtrip():
    F = field(5)
    M = LaurentTransitionMatrix.from_lists(F, [["3*t^-2", "0"], ["2", "t"]])
    assert transition_from_json(M.to_json()) == M
    with pytest.raises(BundleError):
        transition_from_json({"q": 5})


def test_nef_obstruction():
    assert nef_obstruction([0, -1])
    assert not nef_obstruction([1, -2])
    assert nef_obstruction([0, 0])


# --- restriction of log cotangent sheaves -----------------------------------------------------

def test_conic_tangent_matrix_and_type():
    # [PAPER] Omega^1(log conic) restricted to a tangent line is O(-2) + O(1)
    res = conic_tangent_example(5)
    F = res.matrix.F
    assert [[e.terms for e in row] for row in res.matrix.rows] == [[{-2: F.neg(1)}, {}], [{0: 2}, {1: F.neg(1)}]]
    assert sorted(splitting_type(res.matrix)) == [-2, 1]
    assert res.determinant_degree == res.expected_degree == -1


def test_conic_tangent_sections():
    # [DERIVED] the bundle glued from the same matrix has exactly one section
    res = conic_tangent_example(5)
    assert _h0(res.matrix) == 1
    assert bundle_splitting_type(res.matrix) == [0, -1]


def _line_through(P, Q, F):
    S = ("s0", "s1")
    return [parse_poly(f"{a}*s0 + {b}*s1", F, S) for a, b in zip(P, Q)]


def _cross(P, Q, p):
    return ((P[1] * Q[2] - P[2] * Q[1]) % p, (P[2] * Q[0] - P[0] * Q[2]) % p, (P[0] * Q[1] - P[1] * Q[0]) % p)


@given(P=st.tuples(*[st.integers(0, 6)] * 3), Q=st.tuples(*[st.integers(0, 6)] * 3))
def test_coordinate_triangle_is_trivial_on_lines(P, Q):
    # [DERIVED] Omega^1(log of the coordinate triangle) is free, so every general line gives {0, 0}
    p = 7
    ell = _cross(P, Q, p)
    if not all(ell):
        return
    F = field(p)
    X = ("x", "y", "z")
    comps = [parse_poly(v, F, X) for v in X]
    res = restrict_log_cotangent(comps, _line_through(P, Q, F))
    assert splitting_type(res.matrix) == [0, 0]
    assert res.determinant_degree == res.expected_degree == 0


@given(P=st.tuples(*[st.integers(0, 6)] * 3), Q=st.tuples(*[st.integers(0, 6)] * 3))
def test_conic_determinant_degree(P, Q):
    # det of the restriction is the degree of K + D on the line, d (deg D - 3) = -1
    p = 7
    if not any(_cross(P, Q, p)):
        return
    F = field(p)
    X = ("x", "y", "z")
    conic = parse_poly("y*z - x^2", F, X)
    try:
        res = restrict_log_cotangent([conic], _line_through(P, Q, F))
    except RestrictionError:
        return
    assert res.determinant_degree == -1
    assert sum(splitting_type(res.matrix)) == -1


def test_three_lines_and_generic_line():
    F = field(5)
    X = ("x", "y", "z")
    comps = [parse_poly(v, F, X) for v in X]
    res = restrict_log_cotangent(comps, _line_through((1, 0, 1), (0, 1, 2), F))
    assert splitting_type(res.matrix) == [0, 0]
    assert res.determinant_degree == 0


def test_line_is_reparametrized_when_charts_misalign():
    F = field(7)
    X = ("x", "y", "z")
    comps = [parse_poly(v, F, X) for v in X]
    res = restrict_log_cotangent(comps, _line_through((0, 1, 1), (1, 1, 2), F))
    assert res.notes and splitting_type(res.matrix) == [0, 0]
    aligned = restrict_log_cotangent(comps, _line_through((1, 0, 1), (0, 1, 2), F))
    assert not aligned.notes


def test_misaligned_conic_parametrization_rejected():
    F = field(5)
    S = ("s0", "s1")
    curve = [parse_poly(f, F, S) for f in ("s0^2 + s1^2", "s0*s1", "s0^2")]
    with pytest.raises(RestrictionError):
        restrict_log_cotangent([parse_poly("x", F, ("x", "y", "z"))], curve)


def test_line_through_a_vertex_obeys_sum_rule():
    # the line x = y passes through [0:0:1], a node of the triangle
    F = field(5)
    X = ("x", "y", "z")
    comps = [parse_poly(v, F, X) for v in X]
    try:
        res = restrict_log_cotangent(comps, _line_through((1, 1, 0), (0, 0, 1), F))
    except RestrictionError:
        return
    assert sum(splitting_type(res.matrix)) == res.determinant_degree


def test_restriction_rejects_curve_inside_divisor():
    F = field(5)
    X = ("x", "y", "z")
    with pytest.raises(RestrictionError):
        restrict_log_cotangent([parse_poly("x", F, X)], _line_through((0, 1, 0), (0, 0, 1), F))


# --- semilinear fixed points ------------------------------------------------------------------

def _brute_count(A, p, m):
    """Count ``v = A v^[p]`` over F_{p^m} by enumeration, using the GF(p^m) tables."""
    E = field(p ** m)
    r = len(A)
    count = 0
    for v in itertools.product(range(E.q), repeat=r):
        w = []
        for row in A:
            acc = 0
            for a, x in zip(row, v):
                acc = E.add(acc, E.mul(a, E.frob(x)))
            w.append(acc)
        count += list(v) == w
    return count


@given(seed=st.integers(0, 10 ** 6), p=st.sampled_from([2, 3]), r=st.integers(1, 2), m=st.integers(1, 3))
def test_fixed_point_count_brute_force(seed, p, r, m):
    if p ** (m * r) > 729:
        m = 1
    rng = random.Random(seed)
    A = [[rng.randrange(p) for _ in range(r)] for _ in range(r)]
    S = SemilinearMap(field(p), A)
    res = semilinear_fixed_points(S, m)
    assert res.count == _brute_count(A, p, m)
    if splitting_degree(S) is not None:
        assert res.count == predicted_count(S, m)


@pytest.mark.parametrize("q", [4, 9])
def test_fixed_points_over_nonprime_field(q):
    rng = random.Random(q)
    F = field(q)
    for _ in range(5):
        A = [[rng.randrange(q) for _ in range(2)] for _ in range(2)]
        S = SemilinearMap(F, A)
        brute = sum(1 for v in itertools.product(range(q), repeat=2) if S(list(v)) == list(v))
        assert semilinear_fixed_points(S, 1).count == brute


@given(seed=st.integers(0, 10 ** 6), p=st.sampled_from([2, 3, 5]), r=st.integers(1, 3))
def test_stabilized_count_is_full(seed, p, r):
    # [PAPER] over a splitting field the fixed points of an invertible A form F_p^r
    rng = random.Random(seed)
    F = field(p)
    A = [[rng.randrange(p) for _ in range(r)] for _ in range(r)]
    S = SemilinearMap(F, A)
    if splitting_degree(S) is None:
        return
    res = stabilized_fixed_points(S, "exact")
    assert res.count == p ** r and res.stabilized and not res.cap_hit


def test_doubling_misses_odd_splitting_degree():
    # a 3-cycle permutation over F_2 splits only over F_8, never reached by m = 1, 2, 4, 8
    S = SemilinearMap(field(2), [[0, 0, 1], [1, 0, 0], [0, 1, 0]])
    assert splitting_degree(S) == 3
    dbl = stabilized_fixed_points(S, "doubling", cap=8)
    assert dbl.cap_hit and dbl.count < 8
    assert stabilized_fixed_points(S, "exact").count == 8


def test_singular_matrix_stabilises_below_maximum():
    S = SemilinearMap(field(3), [[1, 0], [0, 0]])
    assert splitting_degree(S) is None
    res = stabilized_fixed_points(S)
    assert res.count == 3 and not res.cap_hit


def test_semilinear_validation():
    with pytest.raises(SemilinearError):
        SemilinearMap(field(3), [[1, 2]])
    with pytest.raises(SemilinearError):
        SemilinearMap(field(3), [[5]])
    with pytest.raises(SemilinearError):
        semilinear_fixed_points(SemilinearMap(field(3), [[1]]), 0)


@pytest.mark.parametrize("p", [3, 5])
def test_etale_fixed_scheme(p):
    F = field(p)
    V = ("x",)
    rep = etale_fixed_scheme_check([[parse_poly(f"x^{p - 1}", F, V)]], [[1], [0]])
    assert rep.ok
    at_one, at_zero = rep.points
    assert at_one["fiber_count"] == p and at_zero["fiber_count"] == 1
