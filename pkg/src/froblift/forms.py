"""Polynomial (log) differential forms on affine space over F_q.

A :class:`LogForm` of degree j is a dict ``I -> Poly`` where ``I`` is a
sorted tuple of j coordinate indices.  The basis element ``b_I`` is the
wedge of ``dlog x_i`` for marked ``i`` and ``dx_i`` for the others.
"""

from __future__ import annotations

from .polynomials import Poly, PolyError


class FormError(ValueError):
    pass


def _merge(i: int, I: tuple):
    """Sign and sorted index tuple of ``e_i ^ e_I``, or (0, None) if ``i in I``."""
    if i in I:
        return 0, None
    pos = sum(1 for j in I if j < i)
    return (-1) ** pos, tuple(sorted(I + (i,)))


def _merge_many(I: tuple, J: tuple):
    if set(I) & set(J):
        return 0, None
    seq = list(I + J)
    # count inversions for the sign
    inv = sum(1 for a in range(len(seq)) for b in range(a + 1, len(seq)) if seq[a] > seq[b])
    return (-1) ** inv, tuple(sorted(seq))


class LogForm:
    __slots__ = ("F", "vars", "degree", "marked", "terms")

    def __init__(self, F, vars, degree: int, terms=None, marked=()):
        self.F = F
        self.vars = tuple(vars)
        self.degree = degree
        self.marked = frozenset(marked)
        n = len(self.vars)
        if any(not 0 <= i < n for i in self.marked):
            raise FormError("marked coordinate out of range")
        clean = {}
        for I, g in (terms or {}).items():
            I = tuple(I)
            if len(I) != degree or list(I) != sorted(set(I)) or any(not 0 <= i < n for i in I):
                raise FormError(f"bad index tuple {I} for a {degree}-form")
            if g.vars != self.vars or g.F != F:
                raise FormError("coefficient in the wrong ring")
            if g:
                clean[I] = g
        self.terms = clean

    @classmethod
    def zero(cls, F, vars, degree, marked=()):
        return cls(F, vars, degree, {}, marked)

    @classmethod
    def function(cls, g: Poly, marked=()):
        return cls(g.F, g.vars, 0, {(): g}, marked)

    @classmethod
    def basis(cls, F, vars, I, marked=(), coeff=None):
        """``coeff * b_I`` (coefficient defaults to 1)."""
        I = tuple(I)
        if coeff is None:
            coeff = Poly.const(F, vars, 1)
        sign, J = _merge_many((), I) if len(set(I)) == len(I) else (0, None)
        if J is None:
            return cls.zero(F, vars, len(I), marked)
        if sign < 0:
            coeff = -coeff
        return cls(F, vars, len(I), {J: coeff}, marked)

    def ring_zero(self):
        return Poly(self.F, self.vars)

    def coeff(self, I):
        return self.terms.get(tuple(I), self.ring_zero())

    def is_zero(self):
        return not self.terms

    def _check(self, other):
        if (self.F, self.vars, self.degree, self.marked) != (other.F, other.vars, other.degree, other.marked):
            raise FormError("forms live in different spaces")

    def __eq__(self, other):
        if not isinstance(other, LogForm):
            return NotImplemented
        return (self.F, self.vars, self.degree, self.marked, self.terms) == (
            other.F, other.vars, other.degree, other.marked, other.terms)

    def __hash__(self):
        return hash((self.vars, self.degree, self.marked, frozenset(self.terms.items())))

    def __add__(self, other):
        self._check(other)
        t = dict(self.terms)
        for I, g in other.terms.items():
            t[I] = t[I] + g if I in t else g
        return LogForm(self.F, self.vars, self.degree, t, self.marked)

    def __neg__(self):
        return LogForm(self.F, self.vars, self.degree, {I: -g for I, g in self.terms.items()}, self.marked)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, g):
        """Multiply by a function (Poly or field element)."""
        if isinstance(g, int):
            return LogForm(self.F, self.vars, self.degree,
                           {I: c.scale(g) for I, c in self.terms.items()}, self.marked)
        return LogForm(self.F, self.vars, self.degree, {I: g * c for I, c in self.terms.items()}, self.marked)

    def wedge(self, other):
        if (self.F, self.vars, self.marked) != (other.F, other.vars, other.marked):
            raise FormError("forms live in different spaces")
        t = {}
        for I, g in self.terms.items():
            for J, h in other.terms.items():
                sign, K = _merge_many(I, J)
                if K is None:
                    continue
                term = g * h
                if sign < 0:
                    term = -term
                t[K] = t[K] + term if K in t else term
        return LogForm(self.F, self.vars, self.degree + other.degree, t, self.marked)

    def d_coordinate(self, k: int):
        """``d x_k`` written in this form's basis."""
        x = Poly.var(self.F, self.vars, k)
        coeff = x if k in self.marked else Poly.const(self.F, self.vars, 1)
        return LogForm(self.F, self.vars, 1, {(k,): coeff}, self.marked)

    def d(self):
        """Exterior derivative (basis elements are closed)."""
        t = {}
        for I, g in self.terms.items():
            for k in range(len(self.vars)):
                dg = g.diff(k)
                if not dg:
                    continue
                if k in self.marked:
                    dg = dg * Poly.var(self.F, self.vars, k)
                sign, K = _merge(k, I)
                if K is None:
                    continue
                term = dg if sign > 0 else -dg
                t[K] = t[K] + term if K in t else term
        return LogForm(self.F, self.vars, self.degree + 1, t, self.marked)

    def is_closed(self):
        return self.d().is_zero()

    def remark(self, marked):
        """Rewrite in the basis for another marking (dx_i = x_i dlog x_i)."""
        marked = frozenset(marked)
        t = {}
        for I, g in self.terms.items():
            e = [0] * len(self.vars)
            lose = []
            for i in I:
                if i in marked and i not in self.marked:
                    e[i] += 1
                elif i in self.marked and i not in marked:
                    lose.append(i)
            g = g.shift(e)
            if lose:
                drop = [0] * len(self.vars)
                for i in lose:
                    drop[i] = 1
                try:
                    g = g.exact_div_monomial(drop)
                except PolyError as exc:
                    raise FormError("form has a pole along a coordinate being unmarked") from exc
            t[I] = g
        return LogForm(self.F, self.vars, self.degree, t, marked)

    def map_coeffs(self, fn):
        return LogForm(self.F, self.vars, self.degree, {I: fn(g) for I, g in self.terms.items()}, self.marked)

    def max_degree(self):
        return max((g.degree() for g in self.terms.values()), default=-1)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for I, g in sorted(self.terms.items()):
            basis = "^".join(f"dlog({self.vars[i]})" if i in self.marked else f"d{self.vars[i]}" for i in I)
            parts.append(f"({g})" + (f"*{basis}" if basis else ""))
        return " + ".join(parts)

    def to_json(self):
        return {"vars": list(self.vars), "degree": self.degree, "marked": sorted(self.marked),
                "terms": [{"I": list(I), "g": g.to_json()} for I, g in sorted(self.terms.items())]}


def form_from_json(obj, F=None):
    from .polynomials import poly_from_json

    try:
        vars = list(obj["vars"])
        degree = int(obj["degree"])
        marked = [int(i) for i in obj.get("marked", [])]
        t = {}
        for term in obj["terms"]:
            g = poly_from_json(term["g"])
            if F is None:
                F = g.F
            t[tuple(int(i) for i in term["I"])] = g.rename(vars) if g.vars != tuple(vars) else g
        if F is None:
            raise FormError("cannot infer field of an empty form; give q")
        return LogForm(F, vars, degree, t, marked)
    except (KeyError, TypeError) as exc:
        raise FormError(f"malformed form JSON: {exc}") from exc


def dx(F, vars, i, marked=()):
    """``dx_i`` in the basis of the given marking."""
    return LogForm.zero(F, vars, 0, marked).d_coordinate(i)


def df(g: Poly, marked=()):
    return LogForm.function(g, marked).d()
