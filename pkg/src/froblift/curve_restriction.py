"""Vector bundles on P^1 from Laurent transition matrices, restrictions of log
cotangent sheaves of P^2 to rational curves, and semilinear fixed points."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field

import numpy as np

from .extfield import embed_field, nullspace_mod_p
from .fields import GF, field
from .laurent import Laurent, RatFunc, UPoly, laurent_from_json, parse_laurent, ugcd
from .polynomials import Poly


class BundleError(ValueError):
    pass


class RestrictionError(ValueError):
    pass


# --- Laurent transition matrices ---------------------------------------------

def _det(F, M):
    """Determinant by cofactor expansion (r <= 4); works for any ring with + - *."""
    r = len(M)
    if r == 1:
        return M[0][0]
    total = None
    for j in range(r):
        if M[0][j].is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in M[1:]]
        term = M[0][j] * _det(F, minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    if total is None:
        return M[0][0] - M[0][0]
    return total


@dataclass
class LaurentTransitionMatrix:
    """Transition from the chart at 0 to the chart at infinity of a rank-r bundle on P^1."""

    F: GF
    rows: list

    def __post_init__(self):
        r = len(self.rows)
        if r == 0 or any(len(row) != r for row in self.rows):
            raise BundleError("transition matrix must be square and nonempty")

    @property
    def r(self):
        return len(self.rows)

    @classmethod
    def from_lists(cls, F, rows):
        """Entries as dicts ``{exponent: coeff}``, strings or Laurent objects."""
        out = []
        for row in rows:
            new = []
            for e in row:
                if isinstance(e, Laurent):
                    new.append(e)
                elif isinstance(e, str):
                    new.append(parse_laurent(e, F))
                elif isinstance(e, dict) and "num" in e:
                    new.append(laurent_from_json(e, F))
                elif isinstance(e, dict):
                    new.append(Laurent(F, {int(k): F.from_int(int(c)) for k, c in e.items()}))
                elif isinstance(e, int):
                    new.append(Laurent.const(F, F.from_int(e)))
                else:
                    raise BundleError(f"cannot read matrix entry {e!r}")
            out.append(new)
        return cls(F, out)

    @classmethod
    def diagonal(cls, F, degrees):
        r = len(degrees)
        return cls(F, [[Laurent.monomial(F, a) if i == j else Laurent(F) for j in range(r)]
                       for i, a in enumerate(degrees)])

    def det(self) -> Laurent:
        return _det(self.F, self.rows)

    def is_invertible(self) -> bool:
        return self.det().is_unit()

    def transpose(self):
        return LaurentTransitionMatrix(self.F, [list(c) for c in zip(*self.rows)])

    def __matmul__(self, other):
        F = self.F
        out = []
        for row in self.rows:
            new = []
            for col in zip(*other.rows):
                acc = Laurent(F)
                for a, b in zip(row, col):
                    acc = acc + a * b
                new.append(acc)
            out.append(new)
        return LaurentTransitionMatrix(F, out)

    def __eq__(self, other):
        return isinstance(other, LaurentTransitionMatrix) and self.rows == other.rows

    def to_json(self):
        return {"q": self.F.q, "r": self.r, "entries": [[e.to_json() for e in row] for row in self.rows]}

    def __repr__(self):
        return "[" + ", ".join("[" + ", ".join(map(repr, row)) + "]" for row in self.rows) + "]"


def transition_from_json(obj) -> LaurentTransitionMatrix:
    try:
        F = field(int(obj["q"]))
        return LaurentTransitionMatrix.from_lists(F, obj["entries"])
    except (KeyError, TypeError, ValueError) as exc:
        raise BundleError(f"malformed transition matrix: {exc}") from exc


# --- Birkhoff factorisation ----------------------------------------------------

def _row_degree(row):
    degs = [e.degree() for e in row if not e.is_zero()]
    return max(degs) if degs else None


def _leading_kernel_vector(F, L):
    """A nonzero ``c`` with ``c L = 0`` (row dependency), or None."""
    r = len(L)
    # Gaussian elimination on the transpose over F_q
    A = [list(col) + [1 if i == j else 0 for j in range(r)] for i, col in enumerate(L)]
    piv_row = 0
    for c in range(r):
        piv = next((i for i in range(piv_row, r) if A[i][c]), None)
        if piv is None:
            continue
        A[piv_row], A[piv] = A[piv], A[piv_row]
        inv = F.inv(A[piv_row][c])
        A[piv_row] = [F.mul(inv, x) for x in A[piv_row]]
        for i in range(r):
            if i != piv_row and A[i][c]:
                f = A[i][c]
                A[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(A[i], A[piv_row])]
        piv_row += 1
    if piv_row == r:
        return None
    return A[piv_row][r:]


def row_reduce(M: LaurentTransitionMatrix):
    """Row-reduced form ``U M`` with ``U`` invertible over k[t]; returns (rows, degrees)."""
    F = M.F
    if not M.is_invertible():
        raise BundleError(f"determinant {M.det()} is not a unit of k[t, 1/t]")
    rows = [list(row) for row in M.rows]
    r = len(rows)
    for _ in range(10_000):
        degs = [_row_degree(row) for row in rows]
        L = [[row[j].coeff(d) for j in range(r)] for row, d in zip(rows, degs)]
        c = _leading_kernel_vector(F, L)
        if c is None:
            return rows, degs
        support = [i for i in range(r) if c[i]]
        i0 = max(support, key=lambda i: (degs[i], i))
        inv = F.inv(c[i0])
        new = [Laurent(F) for _ in range(r)]
        for i in support:
            mult = Laurent.monomial(F, degs[i0] - degs[i], F.mul(c[i], inv))
            new = [a + mult * b for a, b in zip(new, rows[i])]
        rows[i0] = new
    raise BundleError("row reduction did not terminate")


def splitting_type(M: LaurentTransitionMatrix) -> list:
    """Exponents ``a_1 >= ... >= a_r`` with ``M = U diag(t^a) V``, ``U`` over k[t], ``V`` over k[1/t].

    Row reduction: while the matrix of leading row coefficients is singular,
    cancel the leading terms of the highest row of a dependency using
    multiples by non-negative powers of ``t`` of the other rows.  The result
    is ``diag(t^d) C(1/t)`` with ``C(infinity)`` invertible.
    """
    _, degs = row_reduce(M)
    return sorted(degs, reverse=True)


def bundle_splitting_type(M: LaurentTransitionMatrix) -> list:
    """Splitting type of the bundle whose generator frames satisfy ``e_inf = M e_0``.

    A section with coordinates ``f`` in the chart at 0 has coordinates ``g``
    at infinity with ``f = g M``; the cocycle acting on coordinates is the
    transpose, so the bundle type is the splitting type of ``M^T``.
    """
    return splitting_type(M.transpose())


def nef_obstruction(type_, p: int | None = None) -> bool:
    """True iff every ``a_i <= 0``, so ``F^*E -> E`` injective is not excluded."""
    return max(type_) <= 0


# --- restriction of log cotangent sheaves ---------------------------------------

@dataclass
class RestrictionResult:
    matrix: LaurentTransitionMatrix
    chart0: int
    chart_inf: int
    generators0: list
    generators_inf: list
    expected_degree: int
    notes: list = dc_field(default_factory=list)

    @property
    def determinant_degree(self):
        return self.matrix.det().valuation()

    def to_json(self):
        return {"matrix": self.matrix.to_json(), "chart0": self.chart0, "chart_inf": self.chart_inf,
                "generators0": self.generators0, "generators_inf": self.generators_inf,
                "expected_degree": self.expected_degree, "determinant_degree": self.determinant_degree,
                "notes": self.notes}


def _eval_rat(f: Poly, point):
    F = f.F
    acc = RatFunc(UPoly(F))
    for e, c in f.terms.items():
        term = RatFunc.const(F, c)
        for x, a in zip(point, e):
            for _ in range(a):
                term = term * x
        acc = acc + term
    return acc


def _curve_values(curve, at_infinity):
    """Homogeneous coordinates of the curve along ``[1:t]`` or ``[u:1]``."""
    out = []
    for phi in curve:
        F = phi.F
        c = {}
        for (a, b), v in phi.terms.items():
            k = a if at_infinity else b
            c[k] = F.add(c.get(k, 0), v)
        n = max(c) + 1 if c else 0
        out.append(RatFunc(UPoly(F, [c.get(i, 0) for i in range(n)])))
    return out


def _constant_chart(values):
    for a, v in enumerate(values):
        if not v.is_zero() and v.num.degree() == 0 and v.den.degree() == 0:
            return a
    return None


def _candidates(components, values, a, others):
    """Candidate generators on the chart ``X_a != 0`` along the curve.

    Vectors are coefficient lists in ``dz_j`` (``j in others``), ``z_j = X_j/X_a``.
    """
    F = values[0].F
    z = [v / values[a] for v in values]
    vecs, labels = [], []
    one, zero = RatFunc.const(F, 1), RatFunc(UPoly(F))
    for j in others:
        vecs.append([one if k == j else zero for k in others])
        labels.append(f"d(X{j}/X{a})")
    for idx, h in enumerate(components):
        hv = _eval_rat(h, z)
        if hv.is_zero():
            raise RestrictionError(f"curve lies inside divisor component {idx}")
        vecs.append([_eval_rat(h.diff(j), z) / hv for j in others])
        labels.append(f"dlog D{idx}")
    return vecs, labels


def _rat_det(M):
    r = len(M)
    if r == 1:
        return M[0][0]
    total = RatFunc(UPoly(M[0][0].F))
    for j in range(r):
        if M[0][j].is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in M[1:]]
        term = M[0][j] * _rat_det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def _fractional_gcd(values):
    """Generator ``g/D`` of the fractional ideal of k[s] spanned by ``values``."""
    F = values[0].F
    D = UPoly.const(F, 1)
    for v in values:
        D = (D * v.den).divmod(ugcd(D, v.den))[0]
    g = UPoly(F)
    for v in values:
        g = ugcd(g, v.num * D.divmod(v.den)[0]) if g else (v.num * D.divmod(v.den)[0]).monic()
    return RatFunc(g, D)


def _lattice_basis(vecs, labels):
    """Basis of the k[s]-span of ``vecs``: first subset whose determinant generates the minor ideal."""
    n = len(vecs[0])
    subsets = list(itertools.combinations(range(len(vecs)), n))
    dets = {S: _rat_det([vecs[i] for i in S]) for S in subsets}
    nonzero = [d for d in dets.values() if not d.is_zero()]
    if not nonzero:
        raise RestrictionError("generators do not span a rank-2 module")
    g = _fractional_gcd(nonzero)
    for S in subsets:
        d = dets[S]
        if d.is_zero():
            continue
        ratio = d / g
        if ratio.num.degree() == 0 and ratio.den.degree() == 0:
            return [vecs[i] for i in S], [labels[i] for i in S]
    return _hermite_basis(vecs), ["hermite"] * n


def _hermite_basis(vecs):
    """Echelon basis of the k[s]-span via Euclid on polynomial entries."""
    F = vecs[0][0].F
    D = UPoly.const(F, 1)
    for v in vecs:
        for x in v:
            D = (D * x.den).divmod(ugcd(D, x.den))[0]
    rows = [[x.num * D.divmod(x.den)[0] for x in v] for v in vecs]
    n = len(rows[0])
    basis = []
    for c in range(n):
        while True:
            live = [r for r in rows if r[c]]
            if len(live) <= 1:
                break
            piv = min(live, key=lambda r: r[c].degree())
            new = [piv]
            for r in rows:
                if r is piv:
                    continue
                if r[c]:
                    q = r[c].divmod(piv[c])[0]
                    r = [a - q * b for a, b in zip(r, piv)]
                new.append(r)
            rows = new
        live = [r for r in rows if r[c]]
        if not live:
            raise RestrictionError("generators do not span a full-rank module")
        basis.append(live[0])
        rows = [r for r in rows if r is not live[0]]
    return [[RatFunc(x, D) for x in r] for r in basis]


def _rat_inverse(M):
    r = len(M)
    F = M[0][0].F
    zero, one = RatFunc(UPoly(F)), RatFunc.const(F, 1)
    A = [list(row) + [one if i == j else zero for j in range(r)] for i, row in enumerate(M)]
    for c in range(r):
        piv = next((i for i in range(c, r) if not A[i][c].is_zero()), None)
        if piv is None:
            raise RestrictionError("singular generator matrix")
        A[c], A[piv] = A[piv], A[c]
        inv = A[c][c].inverse()
        A[c] = [x * inv for x in A[c]]
        for i in range(r):
            if i != c and not A[i][c].is_zero():
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[c])]
    return [row[r:] for row in A]


def _rat_matmul(A, B):
    F = A[0][0].F
    out = []
    for row in A:
        new = []
        for col in zip(*B):
            acc = RatFunc(UPoly(F))
            for a, b in zip(row, col):
                acc = acc + a * b
            new.append(acc)
        out.append(new)
    return out


def _aligned_line(curve):
    """Reparametrize a line ``s0 P + s1 Q`` through ``C cap {X_b = 0}`` and ``C cap {X_a = 0}``.

    Then ``X_a`` is constant on ``[1:t]`` and ``X_b`` on ``[u:1]``; the first
    pair ``(a, b)`` of coordinates whose charts cover the line is used.
    """
    F = curve[0].F
    P = [phi.coeff((1, 0)) for phi in curve]
    Q = [phi.coeff((0, 1)) for phi in curve]

    def zero_of(j):
        # the point of the line on X_j = 0, or None if the line lies in it
        if P[j] == 0 and Q[j] == 0:
            return None
        return [F.sub(F.mul(Q[j], x), F.mul(P[j], y)) for x, y in zip(P, Q)]

    for a in range(3):
        for b in range(3):
            if a == b:
                continue
            P2, Q2 = zero_of(b), zero_of(a)
            if P2 is None or Q2 is None or P2[a] == 0 or Q2[b] == 0:
                continue
            S = curve[0].vars
            return [Poly(F, S, {(1, 0): x, (0, 1): y}) for x, y in zip(P2, Q2)]
    raise RestrictionError("two standard charts do not cover the curve")


def restrict_log_cotangent(components, curve) -> RestrictionResult:
    """Transition matrix of ``Omega^1_{P^2}(log D)|_C`` in chart generator bases.

    ``components``: homogeneous Polys in three variables (the reduced
    components of ``D``).  ``curve``: three forms of degree ``d`` in
    ``(s0, s1)``.  The chart at 0 is a standard chart ``X_a != 0`` with
    ``X_a(1, t)`` a nonzero constant, likewise at infinity with ``X_b(u, 1)``.
    Row ``i`` of the result expresses the i-th generator at infinity in the
    generators at 0, as Laurent polynomials in ``t = s1/s0``.  The generators
    are chosen among the coordinate differentials and the ``dlog`` of the
    components; ``D`` is assumed to have normal crossings along ``C``.
    """
    curve = list(curve)
    if len(curve) != 3:
        raise RestrictionError("a curve in P^2 needs three coordinate forms")
    F = curve[0].F
    degs = {phi.degree() for phi in curve if not phi.is_zero()}
    if len(degs) != 1 or not all(phi.is_homogeneous() for phi in curve if not phi.is_zero()):
        raise RestrictionError("parametrization must be forms of a common degree")
    d = degs.pop()
    if any(h.nvars != 3 or not h.is_homogeneous() or h.degree() < 1 for h in components):
        raise RestrictionError("divisor components must be homogeneous of positive degree in 3 variables")

    notes = []
    vals0 = _curve_values(curve, False)
    valsi = _curve_values(curve, True)
    a = _constant_chart(vals0)
    b = _constant_chart(valsi)
    if (a is None or b is None) and d == 1:
        curve = _aligned_line(curve)
        notes.append("line reparametrized so that t = 0 and t = infinity lie on coordinate lines")
        vals0 = _curve_values(curve, False)
        valsi = _curve_values(curve, True)
        a = _constant_chart(vals0)
        b = _constant_chart(valsi)
    if a is None or b is None:
        raise RestrictionError("two standard charts do not cover the curve")

    # coordinates at infinity are the images of those at 0 under swapping X_a and X_b
    oth_a = [j for j in range(3) if j != a]
    oth_b = [a if j == b else j for j in oth_a]
    vecs0, lab0 = _candidates(components, vals0, a, oth_a)
    B0, gen0 = _lattice_basis(vecs0, lab0)
    vecsi, labi = _candidates(components, valsi, b, oth_b)
    Bi, geni = _lattice_basis(vecsi, labi)

    # rewrite the generators at infinity in the variable t and in dz (chart a)
    Bi_t = [[x.substitute_inverse() for x in row] for row in Bi]
    z = [v / vals0[a] for v in vals0]
    zero = RatFunc(UPoly(F))
    J = []
    for j in oth_b:
        # w_j = z_j / z_b, with z_a = 1 constant
        row = []
        for k in oth_a:
            entry = zero
            if k == j:
                entry = entry + z[b].inverse()
            if k == b:
                entry = entry - z[j] / (z[b] * z[b])
            row.append(entry)
        J.append(row)
    T = _rat_matmul(_rat_matmul(Bi_t, J), _rat_inverse(B0))
    try:
        rows = [[x.to_laurent() for x in row] for row in T]
    except ValueError as exc:
        raise RestrictionError("transition is not a Laurent matrix; charts do not cover the curve") from exc
    M = LaurentTransitionMatrix(F, rows)
    deg_D = sum(h.degree() for h in components)
    if not M.is_invertible():
        raise RestrictionError("transition matrix is not invertible over k[t, 1/t]")
    return RestrictionResult(M, a, b, gen0, geni, d * (deg_D - 3), notes)


def conic_tangent_example(q: int = 5) -> RestrictionResult:
    """``D: yz = x^2`` and its tangent line ``y = 0`` at ``[0:0:1]``, coordinates ``(x, y, z)``."""
    F = field(q)
    X = ("x", "y", "z")
    x, y, zz = (Poly.var(F, X, i) for i in range(3))
    conic = y * zz - x * x
    S = ("s0", "s1")
    s0, s1 = Poly.var(F, S, 0), Poly.var(F, S, 1)
    curve = [s1, Poly.zero(F, S), s0]
    return restrict_log_cotangent([conic], curve)


# --- semilinear fixed points ---------------------------------------------------

class SemilinearError(ValueError):
    pass


@dataclass
class SemilinearMap:
    """``v -> A v^[p]`` on ``F_q^r`` (and its extensions)."""

    F: GF
    A: list

    def __post_init__(self):
        r = len(self.A)
        if r == 0 or any(len(row) != r for row in self.A):
            raise SemilinearError("A must be square and nonempty")
        if any(not 0 <= a < self.F.q for row in self.A for a in row):
            raise SemilinearError(f"entries must be elements of F_{self.F.q}")

    @property
    def r(self):
        return len(self.A)

    @property
    def p(self):
        return self.F.p

    def __call__(self, v):
        F = self.F
        vp = [F.frob(x) for x in v]
        out = []
        for row in self.A:
            acc = 0
            for a, x in zip(row, vp):
                acc = F.add(acc, F.mul(a, x))
            out.append(acc)
        return out


def _fq_matmul(F, A, B):
    out = []
    for row in A:
        new = []
        for col in zip(*B):
            acc = 0
            for a, b in zip(row, col):
                acc = F.add(acc, F.mul(a, b))
            new.append(acc)
        out.append(new)
    return out


def _fq_rank(F, A):
    A = [list(r) for r in A]
    rank = 0
    cols = len(A[0]) if A else 0
    for c in range(cols):
        piv = next((i for i in range(rank, len(A)) if A[i][c]), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        inv = F.inv(A[rank][c])
        A[rank] = [F.mul(inv, x) for x in A[rank]]
        for i in range(len(A)):
            if i != rank and A[i][c]:
                f = A[i][c]
                A[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(A[i], A[rank])]
        rank += 1
    return rank


def q_frobenius_matrix(S: SemilinearMap):
    """``B = A A^(p) ... A^(p^(k-1))`` so that fixed points satisfy ``v = B v^(q)``."""
    F = S.F
    B = [list(r) for r in S.A]
    cur = [list(r) for r in S.A]
    for _ in range(1, F.k):
        cur = [[F.frob(x) for x in row] for row in cur]
        B = _fq_matmul(F, B, cur)
    return B


def predicted_count(S: SemilinearMap, m: int) -> int:
    """``p^(r - rank(B^m - 1))`` for invertible ``A``: Galois acts on the solutions through ``B^{-1}``."""
    F = S.F
    B = q_frobenius_matrix(S)
    Bm = [[int(i == j) for j in range(S.r)] for i in range(S.r)]
    for _ in range(m):
        Bm = _fq_matmul(F, Bm, B)
    D = [[F.sub(Bm[i][j], int(i == j)) for j in range(S.r)] for i in range(S.r)]
    return S.p ** (S.r - _fq_rank(F, D))


def splitting_degree(S: SemilinearMap, limit: int = 100_000):
    """Order of ``B`` in ``GL_r(F_q)``; every solution lives over ``F_{q^m}`` for this ``m``."""
    F = S.F
    B = q_frobenius_matrix(S)
    if _fq_rank(F, B) < S.r:
        return None
    I = [[int(i == j) for j in range(S.r)] for i in range(S.r)]
    cur = B
    for m in range(1, limit + 1):
        if cur == I:
            return m
        cur = _fq_matmul(F, cur, B)
    raise SemilinearError("splitting degree exceeds search limit")


@dataclass
class FixedPointResult:
    p: int
    q: int
    r: int
    m: int
    count: int
    basis: list
    dimension: int
    stabilized: bool = True
    cap_hit: bool = False
    history: list = dc_field(default_factory=list)

    def to_json(self):
        return {"p": self.p, "q": self.q, "r": self.r, "m": self.m, "count": self.count,
                "dimension": self.dimension, "stabilized": self.stabilized, "cap_hit": self.cap_hit,
                "history": self.history, "basis": self.basis}


MAX_KERNEL_DIMENSION = 1200


def semilinear_fixed_points(S: SemilinearMap, m: int = 1) -> FixedPointResult:
    """Solve ``v = A v^[p]`` over ``F_{q^m}`` as an F_p-linear kernel of size ``r m log_p(q)``.

    Elements of ``F_{q^m}`` are represented in ``F_p[z]/(G)``; basis vectors
    are returned as lists of coefficient lists in ``z``.
    """
    if m < 1:
        raise SemilinearError("extension degree must be positive")
    F, r, p = S.F, S.r, S.p
    E, emb = embed_field(F, m)
    N = E.N
    if r * N > MAX_KERNEL_DIMENSION:
        raise SemilinearError(f"kernel problem of size {r * N} exceeds {MAX_KERNEL_DIMENSION}")
    mult = {}
    for row in S.A:
        for a in row:
            if a not in mult:
                mult[a] = E.mult_matrix(emb[a])
    # row (pos, j) of K: image of the basis vector z^j e_pos under v -> A v^[p]
    K = np.zeros((r * N, r * N), dtype=np.int64)
    for pos in range(r):
        for i in range(r):
            a = S.A[i][pos]
            if a:
                K[pos * N:(pos + 1) * N, i * N:(i + 1) * N] = E.P @ mult[a] % p
    L = (np.eye(r * N, dtype=np.int64) - K) % p
    ker = nullspace_mod_p(L.T, p)
    basis = [[row[i * N:(i + 1) * N].tolist() for i in range(r)] for row in ker]
    return FixedPointResult(p, F.q, r, m, p ** len(ker), basis, len(ker))


def stabilized_fixed_points(S: SemilinearMap, strategy: str = "exact", cap: int = 8) -> FixedPointResult:
    """Fixed points over a field where the count has stabilised.

    ``exact``: for invertible ``A`` use the splitting degree ``ord(B)``
    directly.  ``doubling``: ``m = 1, 2, 4, ...`` up to ``cap`` until the count
    reaches ``p^r`` (for singular ``A``: until two consecutive counts agree);
    a cap hit is reported in the result.  Singular ``A`` always uses doubling.
    """
    if strategy not in ("exact", "doubling"):
        raise SemilinearError(f"unknown strategy {strategy!r}")
    if strategy == "exact":
        m = splitting_degree(S)
        if m is not None:
            res = semilinear_fixed_points(S, m)
            res.history = [[m, res.count]]
            return res
    invertible = _fq_rank(S.F, S.A) == S.r
    history = []
    prev = None
    m = 1
    while True:
        res = semilinear_fixed_points(S, m)
        history.append([m, res.count])
        # p^r is the maximum; below it only a singular A can have stabilised
        if res.count == S.p ** S.r or (not invertible and prev == res.count):
            res.history = history
            return res
        if 2 * m > cap:
            res.history = history
            res.stabilized = False
            res.cap_hit = True
            return res
        prev = res.count
        m *= 2


@dataclass
class EtaleReport:
    jacobian_identity: bool
    points: list

    @property
    def ok(self):
        return self.jacobian_identity

    def to_json(self):
        return {"jacobian_identity": self.jacobian_identity, "points": self.points}


def etale_fixed_scheme_check(A, samples) -> EtaleReport:
    """Jacobian and fibres of ``f - f^[p] A(x) = 0`` (``f`` a row vector).

    ``A``: square matrix of Polys in the chart variables.  The Jacobian in
    ``f`` is computed symbolically; fibres are counted over a splitting field
    at sample points where ``det A`` is nonzero, and also where ``A`` vanishes.
    """
    r = len(A)
    if r == 0 or any(len(row) != r for row in A):
        raise SemilinearError("A must be square and nonempty")
    F = A[0][0].F
    xvars = A[0][0].vars
    fvars = tuple(f"f{i}" for i in range(r))
    allv = tuple(xvars) + fvars
    fs = [Poly.var(F, allv, v) for v in fvars]
    Ae = [[a.extend(allv) for a in row] for row in A]
    system = []
    for j in range(r):
        eq = fs[j]
        for i in range(r):
            eq = eq - fs[i] ** F.p * Ae[i][j]
        system.append(eq)
    ident = True
    for j, eq in enumerate(system):
        for i, v in enumerate(fvars):
            dv = eq.diff(allv.index(v))
            want = Poly.const(F, allv, 1 if i == j else 0)
            if dv != want:
                ident = False
    out = []
    for pt in samples:
        pt = tuple(pt)
        Av = [[a.evaluate(pt) for a in row] for row in A]
        At = [list(c) for c in zip(*Av)]
        S = SemilinearMap(F, At)
        invertible = _fq_rank(F, At) == r
        res = stabilized_fixed_points(S)
        out.append({"point": list(pt), "det_nonzero": invertible, "fiber_count": res.count,
                    "m": res.m, "stabilized": res.stabilized})
    return EtaleReport(ident, out)
