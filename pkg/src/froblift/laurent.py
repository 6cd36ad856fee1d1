"""Univariate polynomials, rational functions and Laurent polynomials over F_q."""

from __future__ import annotations

from .fields import GF


class UPoly:
    """Dense univariate polynomial; ``c[i]`` is the coefficient of ``t^i``."""

    __slots__ = ("F", "c")

    def __init__(self, F: GF, coeffs=()):
        c = list(coeffs)
        while c and c[-1] == 0:
            c.pop()
        self.F = F
        self.c = c

    @classmethod
    def const(cls, F, a):
        return cls(F, [a])

    @classmethod
    def t(cls, F, k=1):
        return cls(F, [0] * k + [1])

    def degree(self):
        return len(self.c) - 1

    def is_zero(self):
        return not self.c

    def __bool__(self):
        return bool(self.c)

    def lead(self):
        return self.c[-1] if self.c else 0

    def __eq__(self, other):
        return isinstance(other, UPoly) and self.F == other.F and self.c == other.c

    def __hash__(self):
        return hash(tuple(self.c))

    def __add__(self, other):
        F = self.F
        n = max(len(self.c), len(other.c))
        a = self.c + [0] * (n - len(self.c))
        b = other.c + [0] * (n - len(other.c))
        return UPoly(F, [F.add(x, y) for x, y in zip(a, b)])

    def __neg__(self):
        return UPoly(self.F, [self.F.neg(x) for x in self.c])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        F = self.F
        if not self.c or not other.c:
            return UPoly(F)
        out = [0] * (len(self.c) + len(other.c) - 1)
        for i, a in enumerate(self.c):
            if a == 0:
                continue
            for j, b in enumerate(other.c):
                if b:
                    out[i + j] = F.add(out[i + j], F.mul(a, b))
        return UPoly(F, out)

    def scale(self, a):
        return UPoly(self.F, [self.F.mul(a, x) for x in self.c])

    def shift(self, k):
        return UPoly(self.F, [0] * k + self.c)

    def __pow__(self, k):
        out = UPoly.const(self.F, 1)
        for _ in range(k):
            out = out * self
        return out

    def divmod(self, other):
        F = self.F
        if not other.c:
            raise ZeroDivisionError("division by zero polynomial")
        rem = list(self.c)
        dq = len(rem) - len(other.c) + 1
        if dq <= 0:
            return UPoly(F), UPoly(F, rem)
        quo = [0] * dq
        inv = F.inv(other.lead())
        for k in range(dq - 1, -1, -1):
            coef = F.mul(rem[k + len(other.c) - 1], inv)
            quo[k] = coef
            if coef:
                for j, b in enumerate(other.c):
                    rem[k + j] = F.sub(rem[k + j], F.mul(coef, b))
        return UPoly(F, quo), UPoly(F, rem[: len(other.c) - 1])

    def monic(self):
        if not self.c:
            return self
        return self.scale(self.F.inv(self.lead()))

    def valuation(self):
        for i, a in enumerate(self.c):
            if a:
                return i
        return None

    def reverse(self, d=None):
        """``t^d * self(1/t)`` with ``d = degree`` by default."""
        d = self.degree() if d is None else d
        c = self.c + [0] * (d + 1 - len(self.c))
        return UPoly(self.F, list(reversed(c[: d + 1])))

    def evaluate(self, x):
        F = self.F
        acc = 0
        for a in reversed(self.c):
            acc = F.add(F.mul(acc, x), a)
        return acc

    def derivative(self):
        F = self.F
        return UPoly(F, [F.mul(F.from_int(i), a) for i, a in enumerate(self.c)][1:])

    def __repr__(self):
        return "UPoly(" + " + ".join(f"{a}*t^{i}" for i, a in enumerate(self.c) if a) + ")" if self.c else "UPoly(0)"


def ugcd(a: UPoly, b: UPoly) -> UPoly:
    while b:
        a, b = b, a.divmod(b)[1]
    return a.monic()


class RatFunc:
    """``num / den`` in lowest terms with monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num: UPoly, den: UPoly | None = None):
        F = num.F
        if den is None:
            den = UPoly.const(F, 1)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        g = ugcd(num, den) if num else den.monic()
        num = num.divmod(g)[0]
        den = den.divmod(g)[0]
        lc = den.lead()
        inv = F.inv(lc)
        self.num, self.den = num.scale(inv), den.scale(inv)

    @property
    def F(self):
        return self.num.F

    @classmethod
    def const(cls, F, a):
        return cls(UPoly.const(F, a))

    def is_zero(self):
        return self.num.is_zero()

    def __eq__(self, other):
        return isinstance(other, RatFunc) and self.num == other.num and self.den == other.den

    def __add__(self, other):
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    def __neg__(self):
        return RatFunc(-self.num, self.den)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        return RatFunc(self.num * other.num, self.den * other.den)

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return RatFunc(self.den, self.num)

    def __truediv__(self, other):
        return self * other.inverse()

    def is_polynomial(self):
        return self.den.degree() == 0

    def substitute_inverse(self):
        """``r(1/t)`` as a rational function of ``t``."""
        dn, dd = self.num.degree(), self.den.degree()
        num = self.num.reverse() if self.num else UPoly(self.F)
        den = self.den.reverse()
        if dn >= dd:
            den = den.shift(dn - dd)
        else:
            num = num.shift(dd - dn)
        return RatFunc(num, den)

    def to_laurent(self):
        """Laurent polynomial if the denominator is a monomial ``t^k``."""
        F = self.F
        v = self.den.valuation()
        if self.den.degree() != v:
            raise ValueError("not a Laurent polynomial")
        inv = F.inv(self.den.lead())
        return Laurent(F, {i - v: F.mul(a, inv) for i, a in enumerate(self.num.c) if a})

    def __repr__(self):
        return f"({self.num})/({self.den})"


class Laurent:
    """Sparse Laurent polynomial ``sum c_k t^k``."""

    __slots__ = ("F", "terms")

    def __init__(self, F: GF, terms=None):
        self.F = F
        self.terms = {int(k): c for k, c in (terms or {}).items() if c}

    @classmethod
    def const(cls, F, a):
        return cls(F, {0: a})

    @classmethod
    def monomial(cls, F, k, a=1):
        return cls(F, {k: a})

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def degree(self):
        """Largest exponent (``None`` for zero)."""
        return max(self.terms) if self.terms else None

    def valuation(self):
        return min(self.terms) if self.terms else None

    def coeff(self, k):
        return self.terms.get(k, 0)

    def __eq__(self, other):
        return isinstance(other, Laurent) and self.F == other.F and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        F = self.F
        t = dict(self.terms)
        for k, c in other.terms.items():
            t[k] = F.add(t.get(k, 0), c)
        return Laurent(F, t)

    def __neg__(self):
        return Laurent(self.F, {k: self.F.neg(c) for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        F = self.F
        t = {}
        for a, x in self.terms.items():
            for b, y in other.terms.items():
                t[a + b] = F.add(t.get(a + b, 0), F.mul(x, y))
        return Laurent(F, t)

    def scale(self, a):
        return Laurent(self.F, {k: self.F.mul(a, c) for k, c in self.terms.items()})

    def shift(self, k):
        return Laurent(self.F, {e + k: c for e, c in self.terms.items()})

    def is_unit(self):
        return len(self.terms) == 1

    def inverse(self):
        if not self.is_unit():
            raise ZeroDivisionError("only monomials are units in k[t, 1/t]")
        (k, c), = self.terms.items()
        return Laurent(self.F, {-k: self.F.inv(c)})

    def invert_variable(self):
        """``f(1/t)``."""
        return Laurent(self.F, {-k: c for k, c in self.terms.items()})

    def in_polynomial_ring(self):
        return all(k >= 0 for k in self.terms)

    def in_inverse_ring(self):
        return all(k <= 0 for k in self.terms)

    def to_ratfunc(self):
        v = min(0, self.valuation() or 0)
        num = UPoly(self.F, [self.terms.get(i + v, 0) for i in range((self.degree() or 0) - v + 1)])
        return RatFunc(num, UPoly.t(self.F, -v))

    def to_json(self):
        if not self.terms:
            return {"num": {"q": self.F.q, "vars": ["t"], "terms": []}, "tval": 0}
        v = self.valuation()
        return {"num": {"p": self.F.p, "q": self.F.q, "vars": ["t"],
                        "terms": [{"e": [k - v], "c": c} for k, c in sorted(self.terms.items())]},
                "tval": v}

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*t^{k}" for k, c in sorted(self.terms.items()))


def laurent_from_json(obj, F: GF) -> Laurent:
    try:
        tval = int(obj.get("tval", 0))
        t = {}
        for term in obj["num"]["terms"]:
            e = term["e"]
            k = int(e[0] if isinstance(e, list) else e) + tval
            c = int(term["c"][0] if isinstance(term["c"], list) else term["c"])
            if not 0 <= c < F.q:
                raise ValueError(f"coefficient {c} not in F_{F.q}")
            t[k] = F.add(t.get(k, 0), c)
        return Laurent(F, t)
    except (KeyError, TypeError, IndexError) as exc:
        raise ValueError(f"malformed Laurent entry: {exc}") from exc


def parse_laurent(text: str, F: GF) -> Laurent:
    """Parse ``-t^-2 + 2`` style input with integer coefficients."""
    import re

    s = text.replace(" ", "").replace("**", "^")
    if not s:
        raise ValueError("empty entry")
    out = Laurent(F)
    matches = [m for m in re.finditer(r"([+-]?)(\d*)(\*?t(\^\(?-?\d+\)?)?)?", s) if m.group(0)]
    if "".join(m.group(0) for m in matches) != s:
        raise ValueError(f"cannot parse {text!r}")
    for m in matches:
        sign, digits, tpart, power = m.groups()
        if not digits and not tpart:
            raise ValueError(f"cannot parse {text!r}")
        c = int(digits) if digits else 1
        k = 0
        if tpart:
            k = int(power[1:].strip("()")) if power else 1
        c = F.from_int(-c if sign == "-" else c)
        out = out + Laurent(F, {k: c})
    return out
