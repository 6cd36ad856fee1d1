"""Exact integer/rational linear algebra for small matrices."""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from functools import reduce


def vgcd(v) -> int:
    return reduce(gcd, (abs(int(a)) for a in v), 0)


def primitive(v) -> tuple:
    g = vgcd(v)
    if g == 0:
        raise ValueError("zero vector has no primitive direction")
    return tuple(int(a) // g for a in v)


def dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def det_int(M) -> int:
    """Bareiss fraction-free determinant."""
    n = len(M)
    if n == 0:
        return 1
    A = [list(map(int, row)) for row in M]
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k]:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def rref(M):
    """Reduced row echelon form over Q; returns (rows, pivot columns)."""
    A = [[Fraction(a) for a in row] for row in M]
    rows = len(A)
    cols = len(A[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = 1 / A[r][c]
        A[r] = [a * inv for a in A[r]]
        for i in range(rows):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return A, pivots


def rank_q(M) -> int:
    if not M or not M[0]:
        return 0
    return len(rref(M)[1])


def nullspace_q(M, ncols=None):
    """Basis of the right kernel over Q, scaled to primitive integer vectors."""
    if not M:
        n = ncols or 0
        return [tuple(int(i == j) for j in range(n)) for i in range(n)]
    A, piv = rref(M)
    n = len(M[0])
    free = [c for c in range(n) if c not in piv]
    out = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for r, c in enumerate(piv):
            v[c] = -A[r][f]
        den = reduce(lambda a, b: a * b // gcd(a, b), (x.denominator for x in v), 1)
        out.append(primitive([int(x * den) for x in v]))
    return out


def solve_q(M, b):
    """A solution of ``M x = b`` over Q, or None."""
    aug = [list(row) + [bb] for row, bb in zip(M, b)]
    A, piv = rref(aug)
    n = len(M[0])
    if n in piv:
        return None
    x = [Fraction(0)] * n
    for r, c in enumerate(piv):
        x[c] = A[r][n]
    return x


def inverse_q(M):
    n = len(M)
    aug = [list(row) + [int(i == j) for j in range(n)] for i, row in enumerate(M)]
    A, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in A]


def matmul(A, B):
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]


def transpose(A):
    return [list(r) for r in zip(*A)]


def smith_diagonal(M):
    """Nonzero invariant factors of an integer matrix (Smith normal form)."""
    A = [list(map(int, row)) for row in M]
    if not A or not A[0]:
        return []
    m, n = len(A), len(A[0])
    diag = []
    t = 0
    while t < min(m, n):
        # pivot: smallest nonzero entry in the remaining block
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if A[i][j] and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        i, j = best
        A[t], A[i] = A[i], A[t]
        for row in A:
            row[t], row[j] = row[j], row[t]
        while True:
            done = True
            piv = A[t][t]
            for i in range(t + 1, m):
                q = A[i][t] // piv
                if q:
                    A[i] = [a - q * b for a, b in zip(A[i], A[t])]
                if A[i][t]:
                    done = False
            for j in range(t + 1, n):
                q = A[t][j] // piv
                if q:
                    for row in A:
                        row[j] -= q * row[t]
                if A[t][j]:
                    done = False
            if done:
                # divisibility condition on the remaining block
                bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % piv), None)
                if bad is None:
                    break
                A[t] = [a + b for a, b in zip(A[t], A[bad[0]])]
                continue
            # move the smallest nonzero entry of row/column t to the pivot
            cands = [(abs(A[i][t]), i, t) for i in range(t, m) if A[i][t]] + \
                    [(abs(A[t][j]), t, j) for j in range(t, n) if A[t][j]]
            _, i, j = min(cands)
            A[t], A[i] = A[i], A[t]
            for row in A:
                row[t], row[j] = row[j], row[t]
        diag.append(abs(A[t][t]))
        t += 1
    return diag


def rank_z(M) -> int:
    """Rank via Smith normal form (equals the rank over Q)."""
    return len(smith_diagonal(M))
