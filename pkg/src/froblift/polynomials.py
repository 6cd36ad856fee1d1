"""Sparse multivariate polynomials over a small finite field.

A :class:`Poly` is a dict ``exponent tuple -> field element`` (ints, see
:mod:`froblift.fields`) together with the field and the variable names.
Zero coefficients are never stored.  Instances are treated as immutable.
"""

from __future__ import annotations

import random
import re
from itertools import product

from .fields import GF, field

MAX_EXP = 1 << 20


class PolyError(ValueError):
    pass


class Poly:
    __slots__ = ("F", "vars", "terms")

    def __init__(self, F: GF, vars, terms=None):
        self.F = F
        self.vars = tuple(vars)
        n = len(self.vars)
        clean = {}
        if terms:
            for e, c in terms.items():
                e = tuple(e)
                if len(e) != n:
                    raise PolyError(f"exponent {e} does not match {n} variables")
                if F.k == 1:
                    c %= F.q
                if c:
                    if any(x < 0 or x > MAX_EXP for x in e):
                        raise PolyError(f"exponent {e} out of range")
                    clean[e] = c
        self.terms = clean

    # constructors
    @classmethod
    def zero(cls, F, vars):
        return cls(F, vars)

    @classmethod
    def const(cls, F, vars, c):
        return cls(F, vars, {(0,) * len(tuple(vars)): c})

    @classmethod
    def var(cls, F, vars, name_or_index):
        vars = tuple(vars)
        i = vars.index(name_or_index) if isinstance(name_or_index, str) else name_or_index
        e = [0] * len(vars)
        e[i] = 1
        return cls(F, vars, {tuple(e): 1})

    @classmethod
    def monomial(cls, F, vars, e, c=1):
        return cls(F, vars, {tuple(e): c})

    @classmethod
    def from_int_terms(cls, F, vars, terms):
        """Build from integer coefficients, reduced into the prime field."""
        return cls(F, vars, {e: F.from_int(c) for e, c in terms.items()})

    @classmethod
    def random(cls, F, vars, max_deg=3, n_terms=4, rng=None):
        rng = rng or random.Random()
        n = len(tuple(vars))
        t = {}
        for _ in range(n_terms):
            e = tuple(rng.randint(0, max_deg) for _ in range(n))
            t[e] = rng.randrange(F.q)
        return cls(F, vars, t)

    # basic queries
    @property
    def nvars(self):
        return len(self.vars)

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def degree(self):
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree_in(self, i):
        if not self.terms:
            return -1
        return max(e[i] for e in self.terms)

    def is_homogeneous(self, d=None):
        degs = {sum(e) for e in self.terms}
        if not degs:
            return True
        return len(degs) == 1 and (d is None or d in degs)

    def coeff(self, e):
        return self.terms.get(tuple(e), 0)

    def constant_term(self):
        return self.terms.get((0,) * self.nvars, 0)

    def is_constant(self):
        return all(not any(e) for e in self.terms)

    def _check(self, other):
        if self.F != other.F or self.vars != other.vars:
            raise PolyError("polynomials live in different rings")

    def _coerce(self, other):
        if isinstance(other, Poly):
            self._check(other)
            return other
        if isinstance(other, int):
            return Poly.const(self.F, self.vars, self.F.from_int(other))
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, int):
            other = Poly.const(self.F, self.vars, self.F.from_int(other))
        if not isinstance(other, Poly):
            return NotImplemented
        return self.F == other.F and self.vars == other.vars and self.terms == other.terms

    def __hash__(self):
        return hash((self.vars, frozenset(self.terms.items())))

    # arithmetic
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        F = self.F
        t = dict(self.terms)
        for e, c in other.terms.items():
            s = F.add(t.get(e, 0), c)
            if s:
                t[e] = s
            else:
                t.pop(e, None)
        return Poly(F, self.vars, t)

    __radd__ = __add__

    def __neg__(self):
        F = self.F
        return Poly(F, self.vars, {e: F.neg(c) for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        F = self.F
        if c == 0:
            return Poly(F, self.vars)
        return Poly(F, self.vars, {e: F.mul(a, c) for e, a in self.terms.items()})

    def shift(self, e):
        """Multiply by the monomial ``x^e``."""
        return Poly(self.F, self.vars, {tuple(a + b for a, b in zip(k, e)): c for k, c in self.terms.items()})

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        F = self.F
        t = {}
        mul, add = F.mul, F.add
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = add(t.get(e, 0), mul(c1, c2))
        return Poly(F, self.vars, {e: c for e, c in t.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise PolyError("negative power")
        result = Poly.const(self.F, self.vars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def frobenius(self):
        """The p-th power, computed termwise (char p)."""
        F, p = self.F, self.F.p
        return Poly(F, self.vars, {tuple(p * a for a in e): F.frob(c) for e, c in self.terms.items()})

    def frob_power(self, k: int):
        """``self ** (p**k)`` computed termwise."""
        out = self
        for _ in range(k):
            out = out.frobenius()
        return out

    def pth_root(self):
        """Inverse of :meth:`frobenius`; raises unless every exponent is divisible by p."""
        F, p = self.F, self.F.p
        t = {}
        for e, c in self.terms.items():
            if any(a % p for a in e):
                raise PolyError("not a p-th power")
            t[tuple(a // p for a in e)] = F.frob_inv(c)
        return Poly(F, self.vars, t)

    def map_coeffs(self, fn):
        return Poly(self.F, self.vars, {e: fn(c) for e, c in self.terms.items()})

    def diff(self, i: int):
        F = self.F
        t = {}
        for e, c in self.terms.items():
            if e[i] % F.p:
                e2 = list(e)
                e2[i] -= 1
                t[tuple(e2)] = F.mul(c, F.from_int(e[i]))
        return Poly(F, self.vars, t)

    def evaluate(self, point):
        F = self.F
        total = 0
        for e, c in self.terms.items():
            v = c
            for x, a in zip(point, e):
                if a:
                    v = F.mul(v, F.pow(x, a))
            total = F.add(total, v)
        return total

    def substitute(self, images, target_vars=None):
        """Ring map sending variable i to ``images[i]`` (Polys in a common ring)."""
        if target_vars is None:
            target_vars = images[0].vars
        F = self.F
        out = Poly(F, target_vars)
        cache = {}

        def power(i, a):
            key = (i, a)
            if key not in cache:
                cache[key] = images[i] ** a
            return cache[key]

        for e, c in self.terms.items():
            m = Poly.const(F, target_vars, c)
            for i, a in enumerate(e):
                if a:
                    m = m * power(i, a)
            out = out + m
        return out

    def translate(self, point):
        """``f(x + point)``."""
        shifted = [Poly.var(self.F, self.vars, i) + Poly.const(self.F, self.vars, a)
                   for i, a in enumerate(point)]
        return self.substitute(shifted, self.vars)

    def rename(self, vars):
        vars = tuple(vars)
        if len(vars) != self.nvars:
            raise PolyError("variable count mismatch")
        return Poly(self.F, vars, self.terms)

    def extend(self, vars):
        """Embed into a ring with more variables (by name)."""
        vars = tuple(vars)
        idx = [vars.index(v) for v in self.vars]
        t = {}
        for e, c in self.terms.items():
            e2 = [0] * len(vars)
            for j, a in zip(idx, e):
                e2[j] = a
            t[tuple(e2)] = c
        return Poly(self.F, vars, t)

    def divides_monomially(self, e):
        """True iff ``x^e`` divides every term."""
        return all(all(a >= b for a, b in zip(k, e)) for k in self.terms)

    def exact_div_monomial(self, e):
        if not self.divides_monomially(e):
            raise PolyError("monomial does not divide polynomial")
        return Poly(self.F, self.vars, {tuple(a - b for a, b in zip(k, e)): c for k, c in self.terms.items()})

    def sorted_terms(self):
        return sorted(self.terms.items(), reverse=True)

    def __repr__(self):
        return f"Poly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(v if a == 1 else f"{v}^{a}" for v, a in zip(self.vars, e) if a)
            cs = str(c)
            if not mono:
                parts.append(cs)
            elif c == 1:
                parts.append(mono)
            else:
                parts.append(f"{cs}*{mono}")
        return " + ".join(parts)

    # JSON
    def to_json(self):
        return {"p": self.F.p, "q": self.F.q, "vars": list(self.vars),
                "terms": [{"e": list(e), "c": c} for e, c in self.sorted_terms()]}


def poly_from_json(obj) -> Poly:
    """Parse ``{"q":..., "vars":[...], "terms":[{"e":[...],"c":...}]}``.

    ``c`` may be a field element or a Witt pair ``[a0, a1]`` (only ``a0`` used).
    """
    try:
        q = int(obj.get("q", obj["p"]))
        F = field(q)
        if "p" in obj and int(obj["p"]) != F.p:
            raise PolyError(f"p={obj['p']} inconsistent with q={q}")
        vars = list(obj["vars"])
        t = {}
        for term in obj["terms"]:
            c = term["c"]
            if isinstance(c, list):
                c = c[0]
            c = int(c)
            if not 0 <= c < q:
                raise PolyError(f"coefficient {c} not an element of F_{q}")
            e = tuple(int(a) for a in term["e"])
            t[e] = F.add(t.get(e, 0), c)
        return Poly(F, vars, t)
    except (KeyError, TypeError) as exc:
        raise PolyError(f"malformed polynomial JSON: {exc}") from exc


def parse_poly(text: str, F: GF, vars) -> Poly:
    """Parse a small expression like ``x^2*y - 3*x + 1`` (integer coefficients)."""
    vars = tuple(vars)
    s = text.replace(" ", "").replace("**", "^")
    if not s:
        raise PolyError("empty polynomial")
    if s[0] not in "+-":
        s = "+" + s
    out = Poly(F, vars)
    pieces = re.findall(r"([+-])([^+-]+)", s)
    if "".join(a + b for a, b in pieces) != s:
        raise PolyError(f"cannot parse {text!r}")
    for sign, body in pieces:
        c = 1
        e = [0] * len(vars)
        for factor in body.split("*"):
            if not factor:
                raise PolyError(f"bad term {body!r}")
            if factor.isdigit():
                c *= int(factor)
                continue
            name, _, power = factor.partition("^")
            if power and not power.isdigit():
                raise PolyError(f"bad exponent in {factor!r}")
            if name not in vars:
                raise PolyError(f"unknown variable {name!r}")
            e[vars.index(name)] += int(power) if power else 1
        c = F.from_int(c)
        if sign == "-":
            c = F.neg(c)
        out = out + Poly(F, vars, {tuple(e): c})
    return out


def monomials_of_degree(n: int, d: int):
    """All exponent tuples in ``n`` variables of total degree ``d``."""
    if n == 0:
        if d == 0:
            yield ()
        return
    for a in range(d, -1, -1):
        for rest in monomials_of_degree(n - 1, d - a):
            yield (a,) + rest


def monomials_up_to(n: int, d: int):
    for k in range(d + 1):
        yield from monomials_of_degree(n, k)


def box(bounds):
    return product(*[range(b + 1) for b in bounds])


def leading_term(f: Poly):
    """Leading (exponent, coefficient) in degree-then-lex order."""
    return max(f.terms.items(), key=lambda t: (sum(t[0]), t[0]))


def divmod_poly(f: Poly, g: Poly):
    """Division of ``f`` by one polynomial ``g``; ``f = q*g + r``.

    A single polynomial is a Groebner basis of the ideal it generates, so
    ``r == 0`` exactly when ``g`` divides ``f``.
    """
    if g.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    F = f.F
    lt_e, lt_c = leading_term(g)
    inv = F.inv(lt_c)
    quo = {}
    rem = {}
    work = dict(f.terms)
    order = lambda e: (sum(e), e)
    while work:
        e = max(work, key=order)
        c = work[e]
        if all(a >= b for a, b in zip(e, lt_e)):
            qe = tuple(a - b for a, b in zip(e, lt_e))
            qc = F.mul(c, inv)
            quo[qe] = F.add(quo.get(qe, 0), qc)
            for ge, gc in g.terms.items():
                te = tuple(a + b for a, b in zip(qe, ge))
                v = F.sub(work.get(te, 0), F.mul(qc, gc))
                if v:
                    work[te] = v
                else:
                    work.pop(te, None)
        else:
            rem[e] = c
            del work[e]
    return Poly(F, f.vars, quo), Poly(F, f.vars, rem)


def exact_div(f: Poly, g: Poly) -> Poly:
    q, r = divmod_poly(f, g)
    if r:
        raise PolyError("polynomial is not divisible")
    return q
