"""Frobenius splittings: coefficient criteria, Fedder's test and the Cartier operator."""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .fields import GF, field
from .forms import FormError, LogForm
from .polynomials import Poly
from .witt_frobenius import FrobeniusLiftChart, xi_of_form


class SplittingError(ValueError):
    pass


@dataclass(frozen=True)
class SplittingSection:
    """A section of ``omega_{P^n}^{1-p}``: homogeneous of degree ``(n+1)(p-1)``."""

    p: int
    n: int
    s: Poly

    def __post_init__(self):
        if self.s.F.p != self.p:
            raise SplittingError(f"section over {self.s.F}, expected characteristic {self.p}")
        if self.s.nvars != self.n + 1:
            raise SplittingError(f"P^{self.n} needs {self.n + 1} homogeneous variables")
        d = (self.n + 1) * (self.p - 1)
        if self.s.is_zero() or not self.s.is_homogeneous(d):
            raise SplittingError(f"section must be homogeneous of degree {d}")


def splits_Pn(section: SplittingSection) -> bool:
    """Nonzero coefficient of ``(x_0...x_n)^(p-1)``."""
    e = (section.p - 1,) * (section.n + 1)
    return section.s.coeff(e) != 0


def fedder_hypersurface(p: int, f: Poly, at=None) -> bool:
    """Fedder's criterion for ``k[x]/(f)`` at an F_q-rational point of ``V(f)``."""
    if f.F.p != p:
        raise SplittingError(f"polynomial over {f.F}, expected characteristic {p}")
    if f.is_zero():
        raise SplittingError("f = 0")
    at = tuple(at) if at is not None else (0,) * f.nvars
    if len(at) != f.nvars:
        raise SplittingError("point has the wrong number of coordinates")
    if any(not 0 <= a < f.F.q for a in at):
        raise SplittingError("point coordinates must be elements of F_q")
    if f.evaluate(at) != 0:
        raise SplittingError("f is a unit at the point (point not on V(f))")
    g = f.translate(at) if any(at) else f
    g = g ** (p - 1)
    return any(all(a < p for a in e) for e in g.terms)


# --- Cartier operator ------------------------------------------------------

def cartier_inverse(p: int, omega: LogForm) -> LogForm:
    """``C^{-1}(g b_I) = g^p * prod_{i in I unmarked} x_i^(p-1) * b_I``."""
    if omega.F.p != p:
        raise SplittingError(f"form over {omega.F}, expected characteristic {p}")
    t = {}
    for I, g in omega.terms.items():
        e = [0] * len(omega.vars)
        for i in I:
            if i not in omega.marked:
                e[i] = p - 1
        t[I] = g.frobenius().shift(e)
    return LogForm(omega.F, omega.vars, omega.degree, t, omega.marked)


def _graded_pieces(omega: LogForm):
    """``{m: {I: c}}`` with ``omega = sum_m x^m sum_I c dlog_I``."""
    pieces = {}
    for I, g in omega.terms.items():
        for e, c in g.terms.items():
            m = list(e)
            for i in I:
                if i not in omega.marked:
                    m[i] += 1
            pieces.setdefault(tuple(m), {})[I] = c
    return pieces


def _from_dlog(F, vars, degree, marked, m, I, c):
    """The form ``c x^m dlog_I`` in the basis of ``marked`` (must be regular)."""
    e = list(m)
    for i in I:
        if i not in marked:
            e[i] -= 1
            if e[i] < 0:
                raise FormError("piece is not regular in the requested basis")
    return LogForm(F, vars, degree, {I: Poly.monomial(F, vars, e, c)}, marked)


@dataclass
class CartierDecomposition:
    """``omega = C^{-1}(image) + d(primitive)``."""

    image: LogForm
    primitive: LogForm


def cartier_decompose(p: int, omega: LogForm) -> CartierDecomposition:
    """Cartier operator on a closed form of any degree, with the exact part.

    Each multidegree piece ``x^m eta`` (``eta`` a constant combination of
    dlog forms) is closed on its own.  If ``m = 0 mod p`` it lies in the image
    of ``C^{-1}``; otherwise ``mu ^ eta = 0`` with ``mu = sum m_k dlog x_k``
    nonzero, and ``x^m eta = d(x^m iota_k(eta) / m_k)`` for any ``m_k != 0``.
    """
    F = omega.F
    if F.p != p:
        raise SplittingError(f"form over {F}, expected characteristic {p}")
    if not omega.is_closed():
        raise SplittingError("Cartier operator needs a closed form")
    vars, marked, j = omega.vars, omega.marked, omega.degree
    image = LogForm.zero(F, vars, j, marked)
    prim = LogForm.zero(F, vars, max(j - 1, 0), marked)
    for m, eta in sorted(_graded_pieces(omega).items()):
        if all(a % p == 0 for a in m):
            mp = tuple(a // p for a in m)
            for I, c in eta.items():
                image = image + _from_dlog(F, vars, j, marked, mp, I, F.frob_inv(c))
            continue
        if j == 0:
            raise SplittingError("closed function with a non-p-th-power term")
        k = next(i for i, a in enumerate(m) if a % p)
        inv = F.inv(F.from_int(m[k]))
        for I, c in eta.items():
            if k not in I:
                continue
            pos = I.index(k)
            sign = -1 if pos % 2 else 1
            J = I[:pos] + I[pos + 1:]
            coeff = F.mul(c, inv)
            if sign < 0:
                coeff = F.neg(coeff)
            prim = prim + _from_dlog(F, vars, j - 1, marked, m, J, coeff)
    return CartierDecomposition(image, prim)


def cartier(p: int, omega: LogForm) -> LogForm:
    """The Cartier operator ``C`` on a closed form."""
    return cartier_decompose(p, omega).image


def xi_splits_cartier(chart: FrobeniusLiftChart, trials: int = 10, seed: int = 0, bias=None,
                      max_deg: int = 3, marked=()) -> bool:
    """``C(xi(omega)) == omega`` on ``trials`` random 1-forms.

    ``bias`` (a function of the form) perturbs ``xi`` for negative controls.
    """
    rng = random.Random(seed)
    F, vars = chart.F, chart.vars
    for _ in range(trials):
        terms = {(i,): Poly.random(F, vars, max_deg=max_deg, n_terms=3, rng=rng) for i in range(chart.n)}
        omega = LogForm(F, vars, 1, terms, marked)
        image = xi_of_form(chart, omega)
        if bias is not None:
            image = image + bias(omega)
        try:
            if cartier(chart.p, image) != omega:
                return False
        except SplittingError:
            return False
    return True


# --- invariant splittings of P^1 ---------------------------------------------

@dataclass
class SplittingDivisor:
    """Q-divisor on P^1 with F_q-rational support; numerators over ``denominator``."""

    points: list
    infty: int
    denominator: int
    notes: list = dc_field(default_factory=list)

    def __post_init__(self):
        if self.denominator <= 0:
            raise SplittingError("denominator must be positive")
        for _, a in self.points:
            if not 0 < a <= self.denominator:
                raise SplittingError("splitting divisor coefficients must lie in (0, 1]")
        if not 0 <= self.infty <= self.denominator:
            raise SplittingError("splitting divisor coefficients must lie in (0, 1]")

    def coefficients(self):
        out = {str(x): Fraction(a, self.denominator) for x, a in self.points}
        if self.infty:
            out["inf"] = Fraction(self.infty, self.denominator)
        return out

    def degree(self) -> Fraction:
        return sum(self.coefficients().values(), Fraction(0))

    def to_json(self):
        return {"points": [[str(x), a] for x, a in self.points], "infty": self.infty,
                "denominator": self.denominator}


def invariant_section_P1(F: GF, a: int, b: int) -> Poly:
    """``prod_{c in F_p} (x - c y)^a * y^b``."""
    p = F.p
    vars = ("x", "y")
    x, y = Poly.var(F, vars, 0), Poly.var(F, vars, 1)
    s = Poly.const(F, vars, 1)
    for c in range(p):
        s = s * (x - y.scale(c)) ** a
    return s * y ** b


def p1_invariant_coefficient(p: int) -> int:
    """Coefficient of ``x^(p-1) y^(p-1)`` in ``x(x-y)...(x-(p-1)y) y^(p-2)``."""
    s = invariant_section_P1(field(p), 1, p - 2)
    return s.coeff((p - 1, p - 1))


def invariant_splitting_search_P1(p: int, q: int | None = None):
    """Search translation-invariant splitting divisors of degree 2 on P^1.

    Invariant effective divisors with F_p-rational support have coefficient
    ``a`` on every finite point and ``b`` at infinity, ``p*a + b = 2(p-1)``.
    Returns the first witness (as a :class:`SplittingDivisor`) or ``None``.
    """
    F = field(q or p)
    if F.p != p:
        raise SplittingError(f"q={q} is not a power of p={p}")
    for a in range(p):
        b = 2 * (p - 1) - p * a
        if not 0 <= b <= p - 1:
            continue
        s = invariant_section_P1(F, a, b)
        if splits_Pn(SplittingSection(p, 1, s)) and a > 0:
            notes = []
            if p == 2:
                notes.append("p = 2: the candidate (0)+(1) is an invariant splitting")
            return SplittingDivisor([[str(c), a] for c in range(p)], b, p - 1, notes)
    return None
