"""Length-2 Witt vectors, Frobenius liftings of affine charts and the map xi.

Witt vectors are stored in Witt coordinates ``(a0, a1)``: the ghost
components are ``a0`` and ``a0^p + p*a1``.  Over a perfect field
``(a0, a1) = [a0] + V[a1]`` and ``p*(c, d) = (0, c^p)``.

A chart lifting over ``W_2(F_q)[x_1..x_n]`` is given by polynomials ``f_i``
over F_q with ``F(x_i) = x_i^p + p*f_i``; coefficients are acted on by the
Witt Frobenius.  ``delta(g)`` is defined by ``F(g~) = g~^p + p*delta(g~)``
for a lift ``g~`` (the Teichmueller lift unless one is supplied).
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from math import comb

from .fields import GF
from .forms import LogForm
from .polynomials import Poly, PolyError, divmod_poly


class WittError(ValueError):
    pass


class IncompatibleDivisor(WittError):
    pass


class GluingError(WittError):
    pass


@functools.lru_cache(maxsize=None)
def carry_table(F: GF):
    """``carry[a][b] = sum_{0<i<p} (C(p,i)/p) a^i b^(p-i)`` in F_q."""
    p = F.p
    coeffs = [F.from_int(comb(p, i) // p) for i in range(p + 1)]
    table = []
    for a in range(F.q):
        row = []
        for b in range(F.q):
            s = 0
            for i in range(1, p):
                s = F.add(s, F.mul(coeffs[i], F.mul(F.pow(a, i), F.pow(b, p - i))))
            row.append(s)
        table.append(row)
    return table


@dataclass(frozen=True)
class WittScalar2:
    F: GF
    a0: int
    a1: int

    @property
    def p(self):
        return self.F.p

    def _check(self, other):
        if not isinstance(other, WittScalar2):
            raise WittError("expected a Witt vector")
        if other.F != self.F:
            raise WittError(f"Witt vectors over different fields ({self.F} vs {other.F})")

    def __add__(self, other):
        return w2_add(self, other)

    def __mul__(self, other):
        return w2_mul(self, other)

    def __neg__(self):
        F = self.F
        b0 = F.neg(self.a0)
        return WittScalar2(F, b0, F.add(F.neg(self.a1), carry_table(F)[self.a0][b0]))

    def __sub__(self, other):
        return self + (-other)

    def sigma(self):
        F = self.F
        return WittScalar2(F, F.frob(self.a0), F.frob(self.a1))

    def times_p(self):
        return WittScalar2(self.F, 0, self.F.frob(self.a0))

    def is_zero(self):
        return self.a0 == 0 and self.a1 == 0

    def pair(self):
        return (self.a0, self.a1)

    def __repr__(self):
        return f"({self.a0},{self.a1})"


def w2_add(a: WittScalar2, b: WittScalar2) -> WittScalar2:
    a._check(b)
    F = a.F
    s1 = F.sub(F.add(a.a1, b.a1), carry_table(F)[a.a0][b.a0])
    return WittScalar2(F, F.add(a.a0, b.a0), s1)


def w2_mul(a: WittScalar2, b: WittScalar2) -> WittScalar2:
    a._check(b)
    F = a.F
    s1 = F.add(F.mul(F.frob(a.a0), b.a1), F.mul(F.frob(b.a0), a.a1))
    return WittScalar2(F, F.mul(a.a0, b.a0), s1)


def teichmuller(F: GF, a: int) -> WittScalar2:
    return WittScalar2(F, a, 0)


def witt_to_int(w: WittScalar2) -> int:
    """The isomorphism W_2(F_p) -> Z/p^2 (prime fields only)."""
    F = w.F
    if F.k != 1:
        raise WittError("Z/p^2 model only exists for prime fields")
    p = F.p
    return (pow(w.a0, p, p * p) + p * w.a1) % (p * p)


def int_to_witt(F: GF, n: int) -> WittScalar2:
    p = F.p
    n %= p * p
    a0 = n % p
    a1 = ((n - pow(a0, p, p * p)) % (p * p)) // p
    return WittScalar2(F, a0, a1)


class W2Polynomial:
    """A polynomial with coefficients in W_2(F_q); zero coefficients are dropped."""

    __slots__ = ("F", "vars", "terms")

    def __init__(self, F: GF, vars, terms=None):
        self.F = F
        self.vars = tuple(vars)
        self.terms = {tuple(e): w for e, w in (terms or {}).items() if not w.is_zero()}

    @classmethod
    def teichmuller_lift(cls, g: Poly):
        return cls(g.F, g.vars, {e: WittScalar2(g.F, c, 0) for e, c in g.terms.items()})

    @classmethod
    def p_times(cls, g: Poly):
        """``p * h`` for any lift ``h`` of ``g``."""
        F = g.F
        return cls(F, g.vars, {e: WittScalar2(F, 0, F.frob(c)) for e, c in g.terms.items()})

    @classmethod
    def one(cls, F, vars):
        return cls(F, vars, {(0,) * len(tuple(vars)): WittScalar2(F, 1, 0)})

    def reduce(self) -> Poly:
        """Reduction mod p."""
        return Poly(self.F, self.vars, {e: w.a0 for e, w in self.terms.items()})

    def divide_by_p(self) -> Poly:
        """``h`` mod p where ``self = p*h``; raises unless self is divisible by p."""
        F = self.F
        if any(w.a0 for w in self.terms.values()):
            raise WittError("not divisible by p")
        return Poly(F, self.vars, {e: F.frob_inv(w.a1) for e, w in self.terms.items()})

    def _check(self, other):
        if self.F != other.F or self.vars != other.vars:
            raise WittError("W2 polynomials in different rings")

    def __eq__(self, other):
        return isinstance(other, W2Polynomial) and self.F == other.F and self.vars == other.vars \
            and self.terms == other.terms

    def __add__(self, other):
        self._check(other)
        t = dict(self.terms)
        for e, w in other.terms.items():
            t[e] = t[e] + w if e in t else w
        return W2Polynomial(self.F, self.vars, t)

    def __neg__(self):
        return W2Polynomial(self.F, self.vars, {e: -w for e, w in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        self._check(other)
        t = {}
        for e1, w1 in self.terms.items():
            for e2, w2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                w = w1 * w2
                t[e] = t[e] + w if e in t else w
        return W2Polynomial(self.F, self.vars, t)

    def __pow__(self, k: int):
        result = W2Polynomial.one(self.F, self.vars)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def sigma(self):
        return W2Polynomial(self.F, self.vars, {e: w.sigma() for e, w in self.terms.items()})

    def __repr__(self):
        return " + ".join(f"{w}*x^{list(e)}" for e, w in sorted(self.terms.items())) or "0"

    def to_json(self):
        return {"p": self.F.p, "q": self.F.q, "vars": list(self.vars),
                "terms": [{"e": list(e), "c": [w.a0, w.a1]} for e, w in sorted(self.terms.items(), reverse=True)]}


class W2Vector:
    """An element ``(f0, f1)`` of W_2(F_q[x]) in Witt coordinates."""

    __slots__ = ("f0", "f1")

    def __init__(self, f0: Poly, f1: Poly):
        f0._check(f1)
        self.f0, self.f1 = f0, f1

    def __eq__(self, other):
        return isinstance(other, W2Vector) and self.f0 == other.f0 and self.f1 == other.f1

    def __add__(self, other):
        return W2Vector(self.f0 + other.f0, self.f1 + other.f1 - poly_carry(self.f0, other.f0))

    def __mul__(self, other):
        f1 = self.f0.frobenius() * other.f1 + other.f0.frobenius() * self.f1
        return W2Vector(self.f0 * other.f0, f1)

    def sigma(self):
        return W2Vector(self.f0.frobenius(), self.f1.frobenius())

    def __repr__(self):
        return f"({self.f0}, {self.f1})"


def poly_carry(a: Poly, b: Poly) -> Poly:
    p = a.F.p
    out = Poly(a.F, a.vars)
    for i in range(1, p):
        out = out + (a ** i * b ** (p - i)).scale(a.F.from_int(comb(p, i) // p))
    return out


class FrobeniusLiftChart:
    """Affine chart with ``F(x_i) = x_i^p + p*f_i``."""

    def __init__(self, images, vars=None, F=None):
        images = list(images)
        if not images:
            raise WittError("chart needs at least one coordinate")
        self.F = F or images[0].F
        self.vars = tuple(vars) if vars is not None else images[0].vars
        for f in images:
            if f.F != self.F or f.vars != self.vars:
                raise WittError("lift images must live in the chart's polynomial ring")
        if len(images) != len(self.vars):
            raise WittError("need one image per chart coordinate")
        self.images = tuple(images)

    @classmethod
    def standard(cls, F: GF, vars):
        vars = tuple(vars)
        return cls([Poly(F, vars) for _ in vars], vars, F)

    @property
    def p(self):
        return self.F.p

    @property
    def n(self):
        return len(self.vars)

    def var(self, i):
        return Poly.var(self.F, self.vars, i)

    def check_ring(self, g: Poly):
        if g.F != self.F or g.vars != self.vars:
            raise WittError(f"polynomial in {g.vars} over {g.F}, chart is {self.vars} over {self.F}")

    def pullback(self, g: W2Polynomial) -> W2Polynomial:
        """``F(g)`` on the lifted ring."""
        F, p = self.F, self.p
        first = W2Polynomial(F, self.vars, {tuple(p * a for a in e): w.sigma() for e, w in g.terms.items()})
        corr = Poly(F, self.vars)
        for e, w in g.terms.items():
            c = F.frob(w.a0)
            for i, a in enumerate(e):
                if a % p:
                    mono = tuple(p * (b - (j == i)) for j, b in enumerate(e))
                    corr = corr + self.images[i].shift(mono).scale(F.mul(c, F.from_int(a)))
        return first + W2Polynomial.p_times(corr)

    def mod_p_is_frobenius(self, g: Poly) -> bool:
        return self.pullback(W2Polynomial.teichmuller_lift(g)).reduce() == g.frobenius()


def delta(chart: FrobeniusLiftChart, g: Poly, lift: W2Polynomial | None = None) -> Poly:
    """``delta(g~)`` with ``F(g~) = g~^p + p*delta(g~)``.

    The value depends on the lift: ``delta(g~ + p*c~) = delta(g~) + c^p``.
    """
    chart.check_ring(g)
    if lift is None:
        lift = W2Polynomial.teichmuller_lift(g)
    elif lift.reduce() != g:
        raise WittError("lift does not reduce to g")
    diff = chart.pullback(lift) - lift ** chart.p
    return diff.divide_by_p()


def theta_star(chart: FrobeniusLiftChart, v: W2Vector) -> W2Polynomial:
    """``theta*(f0, f1) = f0~^p + p*f1~``."""
    return W2Polynomial.teichmuller_lift(v.f0) ** chart.p + W2Polynomial.p_times(v.f1)


def nu_star(chart: FrobeniusLiftChart, g: W2Polynomial) -> W2Vector:
    """``nu*(g~) = (g, delta(g~))``."""
    g0 = g.reduce()
    return W2Vector(g0, delta(chart, g0, g))


def theta_nu_roundtrip(chart: FrobeniusLiftChart, g, g1: Poly | None = None):
    """Check both composites on the input.

    ``g`` is a :class:`W2Polynomial` (checked against ``theta*nu* = F``) or a
    :class:`Poly`; with ``g1`` given, ``(g, g1)`` is a Witt vector checked
    against ``nu*theta* = sigma``.  Returns the pair of composites.
    """
    if isinstance(g, Poly):
        chart.check_ring(g)
        if g1 is None:
            g = W2Polynomial.teichmuller_lift(g)
        else:
            v = W2Vector(g, g1)
            back = nu_star(chart, theta_star(chart, v))
            if back != v.sigma():
                raise WittError("nu*theta* differs from the Witt Frobenius")
            return theta_star(chart, v), back
    tn = theta_star(chart, nu_star(chart, g))
    if tn != chart.pullback(g):
        raise WittError("theta*nu* differs from the Frobenius lift")
    return tn, nu_star(chart, g)


# --- the map xi ------------------------------------------------------------

def _unit_part(chart: FrobeniusLiftChart, i: int) -> Poly:
    """``u_i = f_i / x_i^p`` for a marked coordinate; strict divisibility."""
    e = [0] * chart.n
    e[i] = chart.p
    try:
        return chart.images[i].exact_div_monomial(e)
    except PolyError as exc:
        raise IncompatibleDivisor(
            f"coordinate {chart.vars[i]} is marked but x^p does not divide its lift image") from exc


def xi_of_basis(chart: FrobeniusLiftChart, i: int, marked) -> LogForm:
    F, vars = chart.F, chart.vars
    marked = frozenset(marked)
    if i in marked:
        u = _unit_part(chart, i)
        return LogForm.basis(F, vars, (i,), marked) + LogForm.function(u, marked).d()
    x = chart.var(i)
    base = LogForm.zero(F, vars, 0, marked).d_coordinate(i).scale(x ** (chart.p - 1))
    return base + LogForm.function(chart.images[i], marked).d()


def xi_of_form(chart: FrobeniusLiftChart, omega: LogForm) -> LogForm:
    """The Frobenius-semilinear image ``xi(omega)`` of a (log) form of any degree."""
    if omega.vars != chart.vars or omega.F != chart.F:
        raise WittError("form and chart live on different rings")
    images = [xi_of_basis(chart, i, omega.marked) for i in range(chart.n)]
    out = LogForm.zero(chart.F, chart.vars, omega.degree, omega.marked)
    for I, g in omega.terms.items():
        term = LogForm.function(g.frobenius(), omega.marked)
        for i in I:
            term = term.wedge(images[i])
        out = out + term
    return out


def xi_matrix(chart: FrobeniusLiftChart, marked=()):
    """``M[i][j]`` = coefficient of ``b_i`` in ``xi(b_j)``."""
    cols = [xi_of_basis(chart, j, marked) for j in range(chart.n)]
    return [[cols[j].coeff((i,)) for j in range(chart.n)] for i in range(chart.n)]


def det_poly(M):
    """Determinant of a square matrix of polynomials (Laplace expansion; n <= 4 here)."""
    n = len(M)
    if n == 0:
        raise WittError("empty matrix")
    if n == 1:
        return M[0][0]
    if n == 2:
        return M[0][0] * M[1][1] - M[0][1] * M[1][0]
    total = None
    for j in range(n):
        if not M[0][j]:
            continue
        minor = [row[:j] + row[j + 1:] for row in M[1:]]
        term = M[0][j] * det_poly(minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    return total if total is not None else M[0][0] - M[0][0]


# --- compatibility ---------------------------------------------------------

def _residue_components(g: Poly):
    """Split ``g = sum_r g_r^p x^r`` over residues ``r`` in ``[0,p)^n``."""
    F, p = g.F, g.F.p
    comps = {}
    for e, c in g.terms.items():
        r = tuple(a % p for a in e)
        comps.setdefault(r, {})[tuple(a // p for a in e)] = F.frob_inv(c)
    return {r: Poly(F, g.vars, t) for r, t in comps.items()}


@dataclass(frozen=True)
class CompatibilityWitness:
    """``delta(h) + c^p = h^p * a``; the lift ``T(h) + p*T(c)`` has ``F(h~) = h~^p (1 + p*a)``."""

    compatible: bool
    a: Poly | None
    c: Poly | None
    reason: str = ""

    def __bool__(self):
        return self.compatible


def is_compatible_divisor(chart: FrobeniusLiftChart, h: Poly, fixed_lift: bool = False) -> CompatibilityWitness:
    """Is ``V(h)`` compatible with the lifting for some lift of ``h``?

    Writing ``delta(h) = sum_r d_r^p x^r`` and using that ``h^p`` is a p-th
    power, ``delta(h) + c^p`` lies in ``(h^p)`` for some ``c`` iff ``h``
    divides every ``d_r`` with ``r != 0``.  With ``fixed_lift`` the
    Teichmueller lift of ``h`` is used as is (``c = 0``).
    """
    chart.check_ring(h)
    if h.is_zero():
        raise WittError("h = 0 does not define a divisor")
    F = chart.F
    d = delta(chart, h)
    zero = (0,) * chart.n
    a = Poly(F, chart.vars)
    c = Poly(F, chart.vars)
    for r, comp in sorted(_residue_components(d).items()):
        quo, rem = divmod_poly(comp, h)
        if rem:
            if r == zero and not fixed_lift:
                # the part not divisible by h is absorbed by c^p
                c = c - rem
            else:
                return CompatibilityWitness(False, None, None, f"component x^{list(r)} not divisible by h")
        a = a + quo.frobenius().shift(r)
    if h.frobenius() * a != d + c.frobenius():
        raise WittError("internal error: compatibility witness does not verify")
    return CompatibilityWitness(True, a, c)


def _coordinate_center(chart, center):
    idx = []
    for v in center:
        if isinstance(v, Poly):
            ones = [e for e in v.terms]
            if len(ones) != 1 or sum(ones[0]) != 1:
                raise WittError("blow-up centers must be generated by chart coordinates")
            v = ones[0].index(1)
        elif isinstance(v, str):
            if v not in chart.vars:
                raise WittError(f"unknown coordinate {v!r}")
            v = chart.vars.index(v)
        if not 0 <= int(v) < chart.n:
            raise WittError("coordinate index out of range")
        idx.append(int(v))
    if not idx:
        raise WittError("empty center")
    return sorted(set(idx))


def is_compatible_blowup_center(chart: FrobeniusLiftChart, center) -> bool:
    """True iff ``f_i`` lies in ``I^p`` for every generator ``x_i`` of the coordinate ideal ``I``."""
    S = _coordinate_center(chart, center)
    p = chart.p
    for i in S:
        for e in chart.images[i].terms:
            if sum(e[j] for j in S) < p:
                return False
    return True


# --- det xi on projective space ---------------------------------------------

def projective_chart(p: int, lifts, k: int, F: GF | None = None) -> FrobeniusLiftChart:
    """Affine chart ``x_k = 1`` of a lifting of P^n given by homogeneous ``f_i``."""
    n = len(lifts) - 1
    F = F or lifts[0].F
    yvars = tuple(v for j, v in enumerate(lifts[0].vars) if j != k)

    def dehom(f):
        t = {}
        for e, c in f.terms.items():
            e2 = tuple(a for j, a in enumerate(e) if j != k)
            t[e2] = F.add(t.get(e2, 0), c)
        return Poly(F, yvars, t)

    fk = dehom(lifts[k])
    images = []
    for j in range(n + 1):
        if j == k:
            continue
        y = Poly.var(F, yvars, j if j < k else j - 1)
        images.append(dehom(lifts[j]) - y.frobenius() * fk)
    return FrobeniusLiftChart(images, yvars, F)


def homogenize(g: Poly, k: int, N: int, xvars) -> Poly:
    """``x_k^N * g(x/x_k)`` for ``g`` in the chart coordinates."""
    F = g.F
    if g.degree() > N:
        raise GluingError(f"chart determinant has degree {g.degree()} > {N}")
    t = {}
    for e, c in g.terms.items():
        e2 = list(e[:k]) + [N - sum(e)] + list(e[k:])
        t[tuple(e2)] = c
    return Poly(F, xvars, t)


def det_xi_charts(p: int, n: int, lifts):
    """Homogenized chart expressions ``H_k`` of ``det xi`` for k = 0..n."""
    if len(lifts) != n + 1:
        raise WittError(f"need {n + 1} lift polynomials")
    F = lifts[0].F
    if F.p != p:
        raise WittError(f"lift polynomials are over {F}, expected characteristic {p}")
    xvars = lifts[0].vars
    for f in lifts:
        if f.vars != xvars or f.F != F:
            raise WittError("lift polynomials must share one ring")
        if f and not f.is_homogeneous(p):
            raise WittError("lift polynomials must be homogeneous of degree p")
    N = (n + 1) * (p - 1)
    out = []
    for k in range(n + 1):
        chart = projective_chart(p, lifts, k, F)
        if n == 0:
            out.append(Poly.const(F, xvars, 1))
            continue
        D = det_poly(xi_matrix(chart))
        out.append(homogenize(D, k, N, xvars))
    return out


def det_xi_divisor_Pn(p: int, n: int, lifts) -> Poly:
    """Section of ``omega^{1-p}`` cut out by ``det xi``, checked on all charts."""
    H = det_xi_charts(p, n, lifts)
    F = H[0].F
    ref = H[0]
    if ref.is_zero():
        raise GluingError("det xi vanishes identically")
    e0, c0 = next(iter(ref.terms.items()))
    for k, Hk in enumerate(H[1:], start=1):
        ck = Hk.coeff(e0)
        if ck == 0 or Hk.scale(F.inv(ck)) != ref.scale(F.inv(c0)):
            raise GluingError(f"chart {k} expression of det xi does not glue with chart 0")
    return ref


def standard_lifts(F: GF, n: int, names=None):
    names = names or tuple(f"x{i}" for i in range(n + 1))
    return [Poly(F, names) for _ in range(n + 1)]
