"""Line-bundle cohomology on smooth complete toric varieties (rank <= 3).

For a torus-invariant divisor ``D = sum a_r D_r`` and a character ``m``
the weight-``m`` part of ``H^i(X, O(D))`` is the reduced cohomology
``H~^{i-1}`` of the subcomplex of the fan induced on the rays with
``<m, u_r> < -a_r`` (the empty complex has ``H~^{-1} = Q``).

Only characters in finitely many chambers of the arrangement
``<m, u_r> = -a_r - 1/2`` can contribute: a chamber carrying nonzero
cohomology and one lattice point is bounded, because otherwise adding
recession vectors gives infinitely many contributing characters.  The
search window is therefore the bounding box of the arrangement's
vertices, computed exactly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from math import comb

import numpy as np

from .fan_toolkit import Fan, canonical_divisor, intersect, is_complete, is_smooth, \
    toric_surface_intersections
from .lattice import det_int, smith_diagonal, solve_q

MAX_WINDOW_POINTS = 5_000_000


class CohomologyError(ValueError):
    pass


@dataclass(frozen=True)
class ToricDivisor:
    fan: Fan
    coeffs: tuple

    def __init__(self, fan: Fan, coeffs):
        coeffs = tuple(int(a) for a in coeffs)
        if len(coeffs) != len(fan.rays):
            raise CohomologyError(f"divisor needs {len(fan.rays)} coefficients, got {len(coeffs)}")
        object.__setattr__(self, "fan", fan)
        object.__setattr__(self, "coeffs", coeffs)

    def __add__(self, other):
        self._same(other)
        return ToricDivisor(self.fan, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other):
        self._same(other)
        return ToricDivisor(self.fan, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self):
        return ToricDivisor(self.fan, [-a for a in self.coeffs])

    def __rmul__(self, k: int):
        return ToricDivisor(self.fan, [k * a for a in self.coeffs])

    def _same(self, other):
        if self.fan != other.fan:
            raise CohomologyError("divisors on different fans")

    def to_json(self):
        return {"fan": self.fan.to_json(), "coeffs": list(self.coeffs)}


def canonical(fan: Fan) -> ToricDivisor:
    return ToricDivisor(fan, canonical_divisor(fan))


@dataclass
class SectionLattice:
    points: list

    def __len__(self):
        return len(self.points)


# --- window ----------------------------------------------------------------

_ADJ_CACHE = {}


def _adjugates(fan: Fan):
    """Adjugates and determinants of every invertible n-subset of rays."""
    key = fan.rays
    if key not in _ADJ_CACHE:
        n = fan.rank
        subsets, adjs, dets = [], [], []
        for S in itertools.combinations(range(len(fan.rays)), n):
            M = [fan.rays[r] for r in S]
            d = det_int(M)
            if d == 0:
                continue
            if n == 1:
                adj = [[1]]
            else:
                adj = [[(-1) ** (i + j) * det_int([row[:i] + row[i + 1:] for k, row in enumerate(map(list, M)) if k != j])
                        for j in range(n)] for i in range(n)]
            subsets.append(S)
            adjs.append(adj)
            dets.append(d)
        _ADJ_CACHE[key] = (np.array(subsets, dtype=np.int64).reshape(-1, n),
                           np.array(adjs, dtype=np.int64).reshape(-1, n, n),
                           np.array(dets, dtype=np.int64))
    return _ADJ_CACHE[key]


def _arrangement_box(fan: Fan, offsets2):
    """Bounding box of all vertices of ``<m, u_r> = offsets2[r] / 2``."""
    subsets, adjs, dets = _adjugates(fan)
    if len(dets) == 0:
        raise CohomologyError("fan has no full-rank set of rays")
    b = np.asarray(offsets2, dtype=np.int64)[subsets]  # k x n
    num = np.einsum("kij,kj->ki", adjs, b)  # vertex = num / (2 det)
    den = (2 * dets)[:, None]
    num = np.where(den < 0, -num, num)
    den = np.abs(den)
    lo = np.floor_divide(num, den).min(axis=0)
    hi = (-np.floor_divide(-num, den)).max(axis=0)
    return [(int(a), int(c)) for a, c in zip(lo, hi)]


def window(D: ToricDivisor):
    """Integer box containing every character with nonzero cohomology."""
    box = _arrangement_box(D.fan, [-2 * a - 1 for a in D.coeffs])
    # the section polytope <m,u> >= -a is covered too
    box2 = _arrangement_box(D.fan, [-2 * a for a in D.coeffs])
    return [(min(a[0], b[0]), max(a[1], b[1])) for a, b in zip(box, box2)]


def _lattice_points(box):
    size = 1
    for lo, hi in box:
        size *= hi - lo + 1
    if size > MAX_WINDOW_POINTS:
        raise CohomologyError(f"character window of {size} points exceeds the limit")
    axes = [np.arange(lo, hi + 1, dtype=np.int64) for lo, hi in box]
    grids = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


# --- simplicial reduced cohomology -----------------------------------------------

class _FanComplex:
    """Cached reduced cohomology of induced subcomplexes of a fan."""

    _cache = {}

    def __init__(self, fan: Fan):
        self.fan = fan
        self.faces = [c for c in fan.cones if c]
        self.memo = {}

    @classmethod
    def of(cls, fan: Fan):
        key = (fan.rays, tuple(sorted(fan.max_cones)))
        if key not in cls._cache:
            cls._cache[key] = cls(fan)
        return cls._cache[key]

    def reduced_cohomology(self, mask: int):
        """``[dim H~^{-1}, dim H~^0, ..., dim H~^{n-1}]`` of the complex induced on ``mask``."""
        if mask in self.memo:
            return self.memo[mask]
        n = self.fan.rank
        faces = [()] + [c for c in self.faces if all(mask >> i & 1 for i in c)]
        by_dim = {}
        for c in faces:
            by_dim.setdefault(len(c) - 1, []).append(c)
        index = {d: {c: k for k, c in enumerate(cs)} for d, cs in by_dim.items()}
        ranks = {}
        for d in range(-1, n):
            lower, upper = by_dim.get(d, []), by_dim.get(d + 1, [])
            if not lower or not upper:
                ranks[d] = 0
                continue
            # coboundary C^d -> C^{d+1}
            M = [[0] * len(lower) for _ in upper]
            for r, c in enumerate(upper):
                for k in range(len(c)):
                    face = c[:k] + c[k + 1:]
                    M[r][index[d][face]] = (-1) ** k
            ranks[d] = len(smith_diagonal(M))
        out = []
        for d in range(-1, n):
            dim = len(by_dim.get(d, []))
            out.append(dim - ranks[d] - ranks.get(d - 1, 0))
        self.memo[mask] = out
        return out


_CHECKED = {}


def _require(fan: Fan, smooth=True):
    key = (fan, smooth)
    if _CHECKED.get(key):
        return
    _check_fan(fan, smooth)
    _CHECKED[key] = True


def _check_fan(fan: Fan, smooth):
    if fan.rank > 3:
        raise CohomologyError("cohomology only implemented for rank <= 3")
    if not is_complete(fan):
        raise CohomologyError("fan is not complete")
    if smooth and not is_smooth(fan):
        raise CohomologyError("fan is not smooth")


def cohomology_all(D: ToricDivisor):
    """``[h^0, ..., h^n]`` of ``O(D)``."""
    fan = D.fan
    _require(fan)
    n = fan.rank
    pts = _lattice_points(window(D))
    U = np.array(fan.rays, dtype=np.int64)  # r x n
    a = np.array(D.coeffs, dtype=np.int64)
    neg = (pts @ U.T) < -a  # points x rays
    weights = (1 << np.arange(len(fan.rays), dtype=np.int64))
    masks = neg.astype(np.int64) @ weights
    uniq, counts = np.unique(masks, return_counts=True)
    cx = _FanComplex.of(fan)
    h = [0] * (n + 1)
    for mask, cnt in zip(uniq.tolist(), counts.tolist()):
        red = cx.reduced_cohomology(mask)
        for i in range(n + 1):
            h[i] += cnt * red[i]
    return h


def cohomology(D: ToricDivisor, i: int) -> int:
    if not 0 <= i <= D.fan.rank:
        return 0
    return cohomology_all(D)[i]


def global_sections(D: ToricDivisor) -> SectionLattice:
    """Lattice points of ``{m : <m, u_r> >= -a_r}``."""
    fan = D.fan
    if not is_complete(fan):
        raise CohomologyError("section polytope is unbounded: fan is not complete")
    box = _arrangement_box(fan, [-2 * a for a in D.coeffs])
    pts = _lattice_points(box)
    U = np.array(fan.rays, dtype=np.int64)
    a = np.array(D.coeffs, dtype=np.int64)
    ok = np.all((pts @ U.T) >= -a, axis=1)
    return SectionLattice([tuple(int(x) for x in m) for m in pts[ok]])


def riemann_roch_surface(D: ToricDivisor) -> int:
    """``chi = 1 + D.(D - K)/2`` from the intersection form."""
    fan = D.fan
    if fan.rank != 2:
        raise CohomologyError("Riemann-Roch helper is for surfaces")
    M = toric_surface_intersections(fan)
    K = canonical_divisor(fan)
    a = list(D.coeffs)
    val = intersect(M, a, [x - k for x, k in zip(a, K)])
    if val % 2:
        raise CohomologyError("D.(D-K) is odd; intersection data inconsistent")
    return 1 + val // 2


# --- ampleness ---------------------------------------------------------------------

def _cone_character(fan: Fan, D: ToricDivisor, c):
    """``m_c`` with ``<m_c, u_r> = -a_r`` for the rays of a full-dimensional cone."""
    M = [fan.rays[r] for r in c]
    return solve_q(M, [-D.coeffs[r] for r in c])


def ample_test(fan: Fan, D: ToricDivisor) -> bool:
    """Strict convexity of the support function across every wall."""
    if D.fan != fan:
        raise CohomologyError("divisor lives on another fan")
    if not is_complete(fan):
        raise CohomologyError("ampleness test needs a complete fan")
    chars = {c: _cone_character(fan, D, c) for c in fan.max_cones}
    for s, t in itertools.combinations(fan.max_cones, 2):
        wall = set(s) & set(t)
        if len(wall) != fan.rank - 1:
            continue
        (r,) = set(t) - wall
        m = chars[s]
        if sum(x * y for x, y in zip(m, fan.rays[r])) <= -D.coeffs[r]:
            return False
        (r,) = set(s) - wall
        m = chars[t]
        if sum(x * y for x, y in zip(m, fan.rays[r])) <= -D.coeffs[r]:
            return False
    return True


def ample_test_all_rays(fan: Fan, D: ToricDivisor) -> bool:
    """Global version: every cone character is strictly above every other ray."""
    for c in fan.max_cones:
        m = _cone_character(fan, D, c)
        for r in range(len(fan.rays)):
            if r not in c and sum(x * y for x, y in zip(m, fan.rays[r])) <= -D.coeffs[r]:
                return False
    return True


# --- Picard grids ----------------------------------------------------------------

def picard_coordinates(fan: Fan):
    """Rays outside the first full-dimensional maximal cone; their coefficients span Pic."""
    base = next(c for c in fan.max_cones if len(c) == fan.rank)
    return [r for r in range(len(fan.rays)) if r not in base]


def picard_grid(fan: Fan, lo: int, hi: int):
    coords = picard_coordinates(fan)
    for vals in itertools.product(range(lo, hi + 1), repeat=len(coords)):
        a = [0] * len(fan.rays)
        for r, v in zip(coords, vals):
            a[r] = v
        yield ToricDivisor(fan, a)


def ample_classes(fan: Fan, lo: int = 0, hi: int = 4):
    return [D for D in picard_grid(fan, lo, hi) if ample_test(fan, D)]


# --- reports -----------------------------------------------------------------------

@dataclass
class BottReport:
    rank: int
    h: list
    table: dict
    vanishing: bool
    note: str = ("toric pair (X, full boundary): Omega^i(log D) is free of rank C(n,i), "
                 "so h^j(Omega^i(log D) x L) = C(n,i) h^j(L); non-log Omega^i is not computed")

    def to_json(self):
        return {"h": self.h, "table": {f"{i},{j}": v for (i, j), v in sorted(self.table.items())},
                "vanishing": self.vanishing, "note": self.note}


def bott_vanishing_log(fan: Fan, D_ample: ToricDivisor) -> BottReport:
    _require(fan)
    if not ample_test(fan, D_ample):
        raise CohomologyError("divisor is not ample")
    n = fan.rank
    h = cohomology_all(D_ample)
    table = {(i, j): comb(n, i) * h[j] for i in range(n + 1) for j in range(n + 1)}
    ok = all(v == 0 for (i, j), v in table.items() if j > 0)
    return BottReport(n, h, table, ok)


@dataclass
class FlatnessReport:
    window: list
    h1: dict = dc_field(default_factory=dict)

    @property
    def violations(self):
        return sorted(k for k, v in self.h1.items() if v)

    @property
    def criterion_holds(self):
        return not self.violations

    def to_json(self):
        return {"window": self.window, "violations": [list(v) for v in self.violations],
                "criterion_holds": self.criterion_holds,
                "h1": {",".join(map(str, k)): v for k, v in sorted(self.h1.items())}}


def section_ring_flatness(fan: Fan, Ls, window_box) -> FlatnessReport:
    """``h^1`` of every combination ``sum lambda_i L_i`` in the window."""
    _require(fan)
    Ls = list(Ls)
    if not Ls:
        raise CohomologyError("need at least one line bundle")
    window_box = [tuple(w) for w in window_box]
    if len(window_box) != len(Ls) or any(lo > hi for lo, hi in window_box):
        raise CohomologyError("empty or mismatched window")
    rep = FlatnessReport([list(w) for w in window_box])
    for lam in itertools.product(*[range(lo, hi + 1) for lo, hi in window_box]):
        a = [0] * len(fan.rays)
        for k, L in zip(lam, Ls):
            for r, x in enumerate(L.coeffs):
                a[r] += k * x
        rep.h1[lam] = cohomology(ToricDivisor(fan, a), 1)
    return rep
