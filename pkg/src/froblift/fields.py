"""Small finite fields F_q with table arithmetic.

Elements are plain ints in ``range(q)``.  For ``q = p**k`` an integer
``sum(c_i * p**i)`` encodes the residue ``sum(c_i * a**i)`` where ``a`` is a
root of the field's modulus.  The default modulus is the first monic
primitive polynomial of degree ``k`` over F_p, scanning constant terms
first (coefficient vectors ordered as base-p integers ``c_0 + c_1 p + ...``).
It can be overridden with the ``FROBLIFT_MODULI`` environment variable, a
JSON object mapping ``q`` to a little-endian coefficient list, e.g.
``{"9": [2, 2, 1]}`` for ``x^2 + 2x + 2``.
"""

from __future__ import annotations

import functools
import json
import os

MAX_P = 13
MAX_Q = 81


class FieldError(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def prime_power(q: int) -> tuple[int, int]:
    """Return ``(p, k)`` with ``q == p**k`` or raise."""
    for p in range(2, q + 1):
        if q % p == 0:
            k, r = 0, q
            while r % p == 0:
                r //= p
                k += 1
            if r != 1 or not is_prime(p):
                break
            return p, k
    raise FieldError(f"{q} is not a prime power")


def _digits(x: int, p: int, k: int) -> list[int]:
    out = []
    for _ in range(k):
        out.append(x % p)
        x //= p
    return out


def _undigits(ds, p: int) -> int:
    x = 0
    for d in reversed(ds):
        x = x * p + d
    return x


def _mulmod_x(vec: list[int], modulus: list[int], p: int) -> list[int]:
    # multiply a residue (length k) by x modulo a monic polynomial of degree k
    k = len(vec)
    top = vec[-1]
    out = [0] + vec[:-1]
    for i in range(k):
        out[i] = (out[i] - top * modulus[i]) % p
    return out


def _order_of_x(modulus: list[int], p: int, k: int) -> int:
    vec = [0] * k
    vec[0] = 1
    one = list(vec)
    for n in range(1, p**k):
        vec = _mulmod_x(vec, modulus, p)
        if vec == one:
            return n
    return 0


def default_modulus(p: int, k: int) -> list[int]:
    """First monic primitive polynomial of degree ``k`` (little-endian)."""
    if k == 1:
        # primitive element of F_p used only for logs; modulus x - g
        for g in range(1, p):
            if p == 2 or all(pow(g, (p - 1) // r, p) != 1 for r in _prime_factors(p - 1)):
                return [(-g) % p, 1]
    for code in range(p**k):
        low = _digits(code, p, k)
        if low[0] == 0:
            continue
        if _order_of_x(low, p, k) == p**k - 1:
            return low + [1]
    raise FieldError(f"no primitive polynomial found for {p}^{k}")


def _prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _env_modulus(q: int):
    raw = os.environ.get("FROBLIFT_MODULI")
    if not raw:
        return None
    table = json.loads(raw)
    if str(q) in table:
        return [int(c) for c in table[str(q)]]
    return None


class GF:
    """The finite field with ``q`` elements (``q <= 81``, ``p <= 13``)."""

    def __init__(self, q: int, modulus=None):
        p, k = prime_power(q)
        if p > MAX_P or q > MAX_Q:
            raise FieldError(f"F_{q} outside supported range (p <= {MAX_P}, q <= {MAX_Q})")
        self.p, self.k, self.q = p, k, q
        if modulus is None:
            modulus = _env_modulus(q)
        if k == 1:
            self.modulus = [0, 1]
        else:
            if modulus is None:
                modulus = default_modulus(p, k)
            modulus = [c % p for c in modulus]
            if len(modulus) != k + 1 or modulus[-1] != 1:
                raise FieldError(f"modulus for F_{q} must be monic of degree {k}")
            if _order_of_x(modulus[:-1], p, k) != q - 1:
                raise FieldError(f"modulus {modulus} is not primitive over F_{p}")
            self.modulus = modulus
        self._build_tables()

    def _build_tables(self):
        p, k, q = self.p, self.k, self.q
        self.add_table = [[_undigits([(a + b) % p for a, b in zip(_digits(x, p, k), _digits(y, p, k))], p)
                           for y in range(q)] for x in range(q)]
        self.neg_table = [_undigits([(-a) % p for a in _digits(x, p, k)], p) for x in range(q)]
        exp = [0] * (2 * q)
        log = [0] * q
        if k == 1:
            g = (-default_modulus(p, 1)[0]) % p
            x = 1
            for i in range(q - 1):
                exp[i] = x
                log[x] = i
                x = x * g % p
        else:
            vec = [1] + [0] * (k - 1)
            for i in range(q - 1):
                x = _undigits(vec, p)
                exp[i] = x
                log[x] = i
                vec = _mulmod_x(vec, self.modulus[:-1], p)
        for i in range(q - 1, 2 * q):
            exp[i] = exp[i - (q - 1)]
        self.exp, self.log = exp, log

    def __repr__(self):
        return f"GF({self.q})"

    def __eq__(self, other):
        return isinstance(other, GF) and self.q == other.q and self.modulus == other.modulus

    def __hash__(self):
        return hash((self.q, tuple(self.modulus)))

    def __reduce__(self):
        return (field, (self.q,))

    # arithmetic on ints
    def add(self, a: int, b: int) -> int:
        return self.add_table[a][b]

    def sub(self, a: int, b: int) -> int:
        return self.add_table[a][self.neg_table[b]]

    def neg(self, a: int) -> int:
        return self.neg_table[a]

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self.exp[self.log[a] + self.log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in finite field")
        return self.exp[(self.q - 1 - self.log[a]) % (self.q - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if e == 0:
            return 1
        if a == 0:
            if e < 0:
                raise ZeroDivisionError("0 to a negative power")
            return 0
        return self.exp[(self.log[a] * e) % (self.q - 1)]

    def frob(self, a: int) -> int:
        return self.pow(a, self.p)

    def frob_inv(self, a: int) -> int:
        # inverse of x -> x^p is x -> x^(q/p)
        return self.pow(a, self.q // self.p)

    def from_int(self, n: int) -> int:
        """Image of the integer ``n`` under Z -> F_q."""
        return n % self.p

    def elements(self) -> range:
        return range(self.q)

    def to_digits(self, a: int) -> list[int]:
        return _digits(a, self.p, self.k)


@functools.lru_cache(maxsize=None)
def field(q: int) -> GF:
    """Shared field instance for ``q`` (honours ``FROBLIFT_MODULI`` at first use)."""
    return GF(q)
