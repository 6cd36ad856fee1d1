import random

import pytest
from hypothesis import settings

from froblift.fields import field
from froblift.polynomials import Poly

settings.register_profile("froblift", deadline=None, max_examples=40, derandomize=True)
settings.load_profile("froblift")

PRIMES = (2, 3, 5, 7)


def rank_mod(rows, p):
    """Plain Gaussian elimination over F_p, kept separate from the package."""
    M = [[x % p for x in row] for row in rows]
    rank, ncols = 0, len(M[0]) if M else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(M)) if M[i][c]), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        inv = pow(M[rank][c], p - 2, p)
        M[rank] = [x * inv % p for x in M[rank]]
        for i in range(len(M)):
            if i != rank and M[i][c]:
                f = M[i][c]
                M[i] = [(a - f * b) % p for a, b in zip(M[i], M[rank])]
        rank += 1
    return rank


def to_sympy(f):
    """Sympy polynomial with the same integer coefficients (prime fields only)."""
    import sympy
    syms = sympy.symbols(f.vars)
    expr = sum(c * sympy.prod([s ** e for s, e in zip(syms, exps)]) for exps, c in f.terms.items())
    return sympy.Poly(expr, *syms, modulus=f.F.p)


def from_sympy_terms(P):
    """``{exponents: coefficient mod p}`` from a sympy polynomial over GF(p)."""
    p = P.get_modulus()
    return {e: int(c) % p for e, c in P.terms() if int(c) % p}


@pytest.fixture
def rng():
    return random.Random(1234)


def random_poly(rng, p, vars, max_deg=3, n_terms=4):
    return Poly.random(field(p), vars, max_deg=max_deg, n_terms=n_terms, rng=rng)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
