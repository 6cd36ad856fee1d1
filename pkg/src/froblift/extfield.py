"""Prime-field extensions F_p[z]/(G) with numpy arithmetic, and rank/kernels mod p."""

from __future__ import annotations

import functools
import itertools

import numpy as np

from .fields import GF, field


def _prime_factors(n):
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


def _trim(a):
    nz = np.nonzero(a)[0]
    return a[: nz[-1] + 1] if len(nz) else a[:0]


def poly_divmod_p(a, b, p):
    """Division of coefficient arrays (low to high) over F_p."""
    a = _trim(np.array(a, dtype=np.int64) % p)
    b = _trim(np.array(b, dtype=np.int64) % p)
    if len(b) == 0:
        raise ZeroDivisionError("division by zero polynomial")
    inv = pow(int(b[-1]), p - 2, p)
    q = np.zeros(max(len(a) - len(b) + 1, 0), dtype=np.int64)
    a = a.copy()
    for k in range(len(a) - len(b), -1, -1):
        c = a[k + len(b) - 1] * inv % p
        if c:
            q[k] = c
            a[k: k + len(b)] = (a[k: k + len(b)] - c * b) % p
    return q, _trim(a[: len(b) - 1])


def poly_gcd_p(a, b, p):
    a = _trim(np.array(a, dtype=np.int64) % p)
    b = _trim(np.array(b, dtype=np.int64) % p)
    while len(b):
        a, b = b, poly_divmod_p(a, b, p)[1]
    if len(a):
        a = a * pow(int(a[-1]), p - 2, p) % p
    return a


def _reduce(a, G, p):
    """Reduce an array modulo the monic ``G`` (length N+1)."""
    N = len(G) - 1
    a = a % p
    for d in range(len(a) - 1, N - 1, -1):
        c = a[d]
        if c:
            a[d - N: d + 1] = (a[d - N: d + 1] - c * G) % p
    out = np.zeros(N, dtype=np.int64)
    m = min(N, len(a))
    out[:m] = a[:m]
    return out


def _frobenius_matrix(G, p):
    """Row ``i`` holds ``z^(i p) mod G``."""
    N = len(G) - 1
    P = np.zeros((N, N), dtype=np.int64)
    cur = np.zeros(N, dtype=np.int64)
    cur[0] = 1
    for i in range(N):
        P[i] = cur
        buf = np.zeros(N + p, dtype=np.int64)
        buf[p: p + N] = cur
        cur = _reduce(buf, G, p)
    return P


def is_irreducible_p(G, p) -> bool:
    """Rabin's test for a monic polynomial over F_p (coefficients low to high)."""
    G = np.array(G, dtype=np.int64) % p
    N = len(G) - 1
    if N == 1:
        return True
    if G[0] == 0:
        return False
    P = _frobenius_matrix(G, p)
    z = np.zeros(N, dtype=np.int64)
    z[1] = 1
    powers = {}
    x = z.copy()
    needed = {N // l for l in _prime_factors(N)}
    for k in range(1, N + 1):
        x = x @ P % p
        if k in needed:
            powers[k] = x.copy()
    if not np.array_equal(x, z):
        return False
    for k in needed:
        diff = powers[k].copy()
        diff[1] = (diff[1] - 1) % p
        if len(poly_gcd_p(diff, G, p)) != 1:
            return False
    return True


@functools.lru_cache(maxsize=None)
def irreducible_poly(p: int, N: int) -> tuple:
    """Lexicographically first monic irreducible of degree ``N`` (low coefficients vary fastest)."""
    if N == 1:
        return (0, 1)
    for tail in itertools.product(range(p), repeat=N):
        G = list(reversed(tail)) + [1]
        if G[0] == 0:
            continue
        if any(sum(c * pow(a, i, p) for i, c in enumerate(G)) % p == 0 for a in range(p)):
            continue
        if is_irreducible_p(G, p):
            return tuple(G)
    raise RuntimeError(f"no irreducible polynomial of degree {N} over F_{p}")


class PrimeExtension:
    """``F_{p^N} = F_p[z]/(G)``; elements are int64 arrays of length ``N``."""

    def __init__(self, p: int, N: int):
        self.p, self.N = p, N
        self.G = np.array(irreducible_poly(p, N), dtype=np.int64)
        self.P = _frobenius_matrix(self.G, p)

    def zero(self):
        return np.zeros(self.N, dtype=np.int64)

    def one(self):
        e = self.zero()
        e[0] = 1
        return e

    def mul(self, a, b):
        return _reduce(np.convolve(a, b) % self.p, self.G, self.p)

    def pow(self, a, e):
        out = self.one()
        base = a.copy()
        while e:
            if e & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            e >>= 1
        return out

    def frob(self, a):
        return a @ self.P % self.p

    def mult_matrix(self, a):
        """Row ``j`` is ``z^j * a``."""
        M = np.zeros((self.N, self.N), dtype=np.int64)
        cur = a % self.p
        for j in range(self.N):
            M[j] = cur
            buf = np.zeros(self.N + 1, dtype=np.int64)
            buf[1:] = cur
            cur = _reduce(buf, self.G, self.p)
        return M


@functools.lru_cache(maxsize=None)
def _embedding(q: int, m: int):
    """``(E, images)`` with ``E = F_{p^(km)}`` and ``images[a]`` the image of ``a in F_q``."""
    Fq = field(q)
    p, k = Fq.p, Fq.k
    E = PrimeExtension(p, k * m)
    if k == 1:
        imgs = []
        for a in range(q):
            e = E.zero()
            e[0] = a
            imgs.append(e)
        return E, tuple(imgs)
    mu = Fq.modulus
    order = p ** E.N - 1
    beta = None
    for seed in itertools.count(1):
        x = E.zero()
        digits = np.base_repr(seed, p)[::-1]
        for i, d in enumerate(digits[: E.N]):
            x[i] = int(d, p)
        if not x.any():
            continue
        y = E.pow(x, order // (q - 1))
        if any(np.array_equal(E.pow(y, (q - 1) // l), E.one()) for l in _prime_factors(q - 1)):
            continue
        cur = E.one()
        for _ in range(q - 1):
            val = E.zero()
            powj = E.one()
            for c in mu:
                val = (val + c * powj) % p
                powj = E.mul(powj, cur)
            if not val.any():
                beta = cur
                break
            cur = E.mul(cur, y)
        if beta is not None:
            break
    basis = [E.one()]
    for _ in range(1, k):
        basis.append(E.mul(basis[-1], beta))
    imgs = []
    for a in range(q):
        e = E.zero()
        for d, b in zip(Fq.to_digits(a), basis):
            e = (e + d * b) % p
        imgs.append(e)
    return E, tuple(imgs)


def embed_field(F: GF, m: int):
    """``F_{q^m}`` as a prime-field extension, with the embedding of ``F_q``."""
    return _embedding(F.q, m)


def nullspace_mod_p(M, p):
    """Basis of ``{x : M x = 0}`` over F_p, as rows of an int64 array."""
    A = np.array(M, dtype=np.int64) % p
    rows, cols = A.shape
    piv_cols = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(A[r:, c])[0]
        if not len(nz):
            continue
        i = r + nz[0]
        if i != r:
            A[[r, i]] = A[[i, r]]
        A[r] = A[r] * pow(int(A[r, c]), p - 2, p) % p
        col = A[:, c].copy()
        col[r] = 0
        nzr = np.nonzero(col)[0]
        if len(nzr):
            A[nzr] = (A[nzr] - np.outer(col[nzr], A[r])) % p
        piv_cols.append(c)
        r += 1
    free = [c for c in range(cols) if c not in set(piv_cols)]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for t, f in enumerate(free):
        basis[t, f] = 1
        for i, c in enumerate(piv_cols):
            basis[t, c] = (-A[i, f]) % p
    return basis


def rank_mod_p(M, p) -> int:
    M = np.asarray(M)
    return M.shape[1] - len(nullspace_mod_p(M, p))
