"""Simplicial lattice fans of rank <= 3: smoothness, completeness, star
subdivisions, automorphisms, surface intersection numbers and the toric
Frobenius lifting."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from importlib import resources

from .lattice import det_int, dot, inverse_q, matmul, nullspace_q, primitive, rank_q, vgcd

MAX_RANK = 3


class FanError(ValueError):
    pass


def _cross(u, v):
    return (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])


class Fan:
    """A simplicial fan given by rays and its maximal cones (ray-index tuples).

    Rays are made primitive and deduplicated; cone indices are remapped.
    Validation (simpliciality, pairwise intersections in common faces) is
    done at construction.
    """

    def __init__(self, rays, cones, rank=None, name=None):
        rays = [tuple(int(a) for a in r) for r in rays]
        if rank is None:
            if not rays:
                raise FanError("cannot infer the rank of a fan without rays")
            rank = len(rays[0])
        if not 1 <= rank <= MAX_RANK:
            raise FanError(f"rank {rank} unsupported (1..{MAX_RANK})")
        self.rank = rank
        self.name = name
        index, prim = {}, []
        remap = []
        for r in rays:
            if len(r) != rank:
                raise FanError(f"ray {r} does not have {rank} coordinates")
            if vgcd(r) == 0:
                raise FanError("zero ray")
            pr = primitive(r)
            if pr not in index:
                index[pr] = len(prim)
                prim.append(pr)
            remap.append(index[pr])
        self.rays = tuple(prim)
        cone_set = []
        for c in cones:
            try:
                cc = tuple(sorted({remap[int(i)] for i in c}))
            except IndexError:
                raise FanError(f"cone {list(c)} refers to a missing ray") from None
            if cc not in cone_set:
                cone_set.append(cc)
        # keep only maximal ones
        maximal = [c for c in cone_set if not any(set(c) < set(d) for d in cone_set)]
        self.max_cones = tuple(maximal)
        used = set(i for c in maximal for i in c)
        if used != set(range(len(self.rays))):
            raise FanError("every ray must lie in some cone")
        self._validate()

    # construction helpers
    def _validate(self):
        for c in self.max_cones:
            if rank_q([self.rays[i] for i in c]) != len(c):
                raise FanError(f"cone {list(c)} is not simplicial (rays linearly dependent)")
        for a, b in itertools.combinations(self.max_cones, 2):
            if not self._meet_in_face(a, b):
                raise FanError(f"cones {list(a)} and {list(b)} do not meet in a common face")

    def _cone_constraints(self, c):
        """(equalities, inequalities) describing cone c as integer normals."""
        R = [self.rays[i] for i in c]
        eqs = nullspace_q(R, self.rank) if R else [tuple(int(i == j) for j in range(self.rank))
                                                    for i in range(self.rank)]
        ineqs = []
        # for each ray: a functional vanishing on the others and on nothing else of span(R)
        for k in range(len(R)):
            others = [R[j] for j in range(len(R)) if j != k]
            sols = nullspace_q(others + list(eqs), self.rank) if (others or eqs) else None
            if sols is None:
                u = R[k]
            else:
                # restrict to functionals not killing R[k]
                u = next(s for s in sols if dot(s, R[k]) != 0)
            if dot(u, R[k]) < 0:
                u = tuple(-a for a in u)
            ineqs.append(u)
        return list(eqs), ineqs

    def _meet_in_face(self, a, b) -> bool:
        common = set(a) & set(b)
        ea, ia = self._cone_constraints(a)
        eb, ib = self._cone_constraints(b)
        eqs = ea + eb
        ineqs = ia + ib
        n = self.rank
        normals = eqs + ineqs
        # extreme rays of the intersection: directions cut out by n-1 independent normals
        cands = set()
        for combo in itertools.combinations(normals, n - 1):
            if n == 1:
                cands.add((1,))
                continue
            if rank_q(list(combo)) != n - 1:
                continue
            ker = nullspace_q(list(combo), n)
            cands.add(ker[0])
        for v in cands:
            for s in (1, -1):
                w = tuple(s * x for x in v)
                if all(dot(e, w) == 0 for e in eqs) and all(dot(u, w) >= 0 for u in ineqs):
                    # w lies in both cones; must lie in the common face
                    if not self._in_cone(sorted(common), w):
                        return False
        return True

    def _in_cone(self, c, w) -> bool:
        if not any(w):
            return True
        if not c:
            return False
        eqs, ineqs = self._cone_constraints(tuple(c))
        return all(dot(e, w) == 0 for e in eqs) and all(dot(u, w) >= 0 for u in ineqs)

    # basic data
    @cached_property
    def cones(self):
        """All cones (faces of maximal cones), including the zero cone."""
        out = set()
        for c in self.max_cones:
            for k in range(len(c) + 1):
                out.update(itertools.combinations(c, k))
        return sorted(out, key=lambda c: (len(c), c))

    def cones_of_dim(self, d):
        return [c for c in self.cones if len(c) == d]

    def __eq__(self, other):
        return isinstance(other, Fan) and self.rays == other.rays and \
            sorted(self.max_cones) == sorted(other.max_cones)

    def __hash__(self):
        return hash((self.rays, tuple(sorted(self.max_cones))))

    def __repr__(self):
        label = f"{self.name}: " if self.name else ""
        return f"Fan({label}rank={self.rank}, rays={list(self.rays)}, cones={[list(c) for c in self.max_cones]})"

    def to_json(self):
        return {"rank": self.rank, "rays": [list(r) for r in self.rays],
                "cones": [list(c) for c in self.max_cones]}

    def cone_index(self, rays) -> int:
        key = tuple(sorted(rays))
        try:
            return self.max_cones.index(key)
        except ValueError:
            raise FanError(f"{list(rays)} is not a maximal cone") from None

    def is_full_dimensional(self, c) -> bool:
        return len(c) == self.rank

    def cone_det(self, c) -> int:
        return det_int([self.rays[i] for i in c])


def fan_from_json(obj, name=None) -> Fan:
    try:
        return Fan(obj["rays"], obj["cones"], obj.get("rank"), name=name or obj.get("name"))
    except (KeyError, TypeError) as exc:
        raise FanError(f"malformed fan JSON: {exc}") from exc


def _maximal_minor_gcd(R):
    k = len(R)
    n = len(R[0])
    g = 0
    from math import gcd
    for cols in itertools.combinations(range(n), k):
        g = gcd(g, abs(det_int([[r[c] for c in cols] for r in R])))
    return g


def is_smooth_cone(fan: Fan, c) -> bool:
    if not c:
        return True
    return _maximal_minor_gcd([fan.rays[i] for i in c]) == 1


def is_smooth(fan: Fan) -> bool:
    """Every maximal cone's rays extend to a Z-basis."""
    return all(is_smooth_cone(fan, c) for c in fan.max_cones)


def _half(v):
    x, y = v
    return 0 if (y > 0 or (y == 0 and x > 0)) else 1


def angle_order(rays):
    """Indices of rank-2 vectors sorted by angle from the positive x-axis (exact)."""
    import functools

    def cmp(i, j):
        u, v = rays[i], rays[j]
        hu, hv = _half(u), _half(v)
        if hu != hv:
            return hu - hv
        c = u[0] * v[1] - u[1] * v[0]
        return -1 if c > 0 else (1 if c < 0 else 0)

    return sorted(range(len(rays)), key=functools.cmp_to_key(cmp))


def is_complete(fan: Fan) -> bool:
    """Do the maximal cones cover R^n?"""
    n = fan.rank
    if n > MAX_RANK:
        raise FanError("completeness only implemented for rank <= 3")
    if any(len(c) != n for c in fan.max_cones):
        return False
    if n == 1:
        return sorted(fan.rays) == [(-1,), (1,)]
    if n == 2:
        order = angle_order(fan.rays)
        m = len(order)
        if m < 3:
            return False
        cones = set(fan.max_cones)
        for k in range(m):
            a, b = order[k], order[(k + 1) % m]
            u, v = fan.rays[a], fan.rays[b]
            if u[0] * v[1] - u[1] * v[0] <= 0:
                return False
            if tuple(sorted((a, b))) not in cones:
                return False
        return len(cones) == m
    # rank 3: facet pairing with opposite sides, plus connectivity
    facets = {}
    for idx, c in enumerate(fan.max_cones):
        for f in itertools.combinations(c, 2):
            facets.setdefault(f, []).append(idx)
    for f, owners in facets.items():
        if len(owners) != 2:
            return False
        normal = _cross(fan.rays[f[0]], fan.rays[f[1]])
        sides = []
        for idx in owners:
            apex = next(i for i in fan.max_cones[idx] if i not in f)
            sides.append(dot(normal, fan.rays[apex]))
        if sides[0] * sides[1] >= 0:
            return False
    seen = {0}
    stack = [0]
    while stack:
        i = stack.pop()
        for owners in facets.values():
            if i in owners:
                for j in owners:
                    if j not in seen:
                        seen.add(j)
                        stack.append(j)
    return len(seen) == len(fan.max_cones)


def star_subdivision(fan: Fan, cone) -> Fan:
    """Star subdivision at the ray ``sum of the cone's generators``.

    ``cone`` is an index into ``fan.max_cones`` or a tuple of ray indices.
    """
    if isinstance(cone, int):
        if not 0 <= cone < len(fan.max_cones):
            raise FanError(f"no maximal cone with index {cone}")
        tau = fan.max_cones[cone]
    else:
        tau = tuple(sorted(cone))
        if tau not in fan.cones:
            raise FanError(f"{list(cone)} is not a cone of the fan")
    if len(tau) < 2:
        raise FanError("star subdivision needs a cone of dimension >= 2")
    if not is_smooth_cone(fan, tau):
        raise FanError("star subdivision is only supported for smooth cones")
    new = tuple(sum(fan.rays[i][k] for i in tau) for k in range(fan.rank))
    new_index = len(fan.rays)
    cones = []
    for sigma in fan.max_cones:
        if set(tau) <= set(sigma):
            for r in tau:
                cones.append(tuple(sorted([i for i in sigma if i != r] + [new_index])))
        else:
            cones.append(sigma)
    return Fan(list(fan.rays) + [new], cones, fan.rank)


# --- automorphisms ------------------------------------------------------------

@dataclass
class FanAutomorphismGroup:
    matrices: list

    def order(self):
        return len(self.matrices)

    def is_group(self) -> bool:
        S = {tuple(map(tuple, M)) for M in self.matrices}
        n = len(self.matrices[0])
        ident = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
        if ident not in S:
            return False
        for A in self.matrices:
            for B in self.matrices:
                if tuple(map(tuple, matmul(A, B))) not in S:
                    return False
        return True


def fan_automorphisms(fan: Fan) -> FanAutomorphismGroup:
    """All unimodular A with A(rays) = rays and A(cones) = cones."""
    n = fan.rank
    if n > MAX_RANK:
        raise FanError("automorphisms only enumerated for rank <= 3")
    base = next((c for c in fan.max_cones if len(c) == n), None)
    if base is None:
        raise FanError("need a full-dimensional cone")
    B = [list(fan.rays[i]) for i in base]  # rows
    Binv = inverse_q(B)
    ray_index = {r: i for i, r in enumerate(fan.rays)}
    cone_set = set(fan.max_cones)
    found = []
    for target in fan.max_cones:
        if len(target) != n:
            continue
        for perm in itertools.permutations(target):
            T = [list(fan.rays[i]) for i in perm]
            # A^T = Binv * T  (A maps B's rays to T's rays: A b_k = t_k)
            At = matmul(Binv, T)
            if any(Fraction(x).denominator != 1 for row in At for x in row):
                continue
            A = [[int(At[j][i]) for j in range(n)] for i in range(n)]
            if abs(det_int(A)) != 1:
                continue
            images = []
            ok = True
            for r in fan.rays:
                img = tuple(sum(A[i][j] * r[j] for j in range(n)) for i in range(n))
                if img not in ray_index:
                    ok = False
                    break
                images.append(ray_index[img])
            if not ok:
                continue
            if all(tuple(sorted(images[i] for i in c)) in cone_set for c in fan.max_cones):
                if A not in found:
                    found.append(A)
    return FanAutomorphismGroup(found)


# --- toric Frobenius lifting ----------------------------------------------------

def dual_basis(fan: Fan, c):
    """Rows ``m_i`` with ``<m_i, v_j> = delta_ij`` for a smooth full-dimensional cone."""
    if len(c) != fan.rank or not is_smooth_cone(fan, c):
        raise FanError("dual basis needs a smooth full-dimensional cone")
    V = [list(fan.rays[i]) for i in c]  # rows v_j
    inv = inverse_q(V)  # V * inv = I, columns of inv are m_i
    return [[int(inv[r][i]) for r in range(fan.rank)] for i in range(fan.rank)]


def multiplication_by_p_witness(fan: Fan, p: int):
    """Chart data of the toric lifting ``x^m -> x^(pm)``.

    Returns ``{"cones_preserved", "charts", "transitions"}``.  Each chart is a
    standard-lift :class:`~froblift.witt_frobenius.FrobeniusLiftChart` on
    the affine chart of a smooth maximal cone; transitions are exponent
    matrices of the monomial coordinate changes, with the check that the
    lifting commutes with them.
    """
    from .fields import field
    from .witt_frobenius import FrobeniusLiftChart

    for c in fan.cones:
        for i in c:
            pv = tuple(p * a for a in fan.rays[i])
            if not fan._in_cone(c, pv):
                raise FanError("multiplication by p does not preserve a cone")
    F = field(p)
    charts, bases = [], []
    for k, c in enumerate(fan.max_cones):
        names = tuple(f"u{k}_{j}" for j in range(len(c)))
        if len(c) == fan.rank and is_smooth_cone(fan, c):
            bases.append(dual_basis(fan, c))
        else:
            bases.append(None)
        charts.append({"cone": list(c), "chart": FrobeniusLiftChart.standard(F, names)})
    transitions = []
    for a, b in itertools.permutations(range(len(fan.max_cones)), 2):
        if bases[a] is None or bases[b] is None:
            continue
        Va = [fan.rays[i] for i in fan.max_cones[a]]
        # coordinate m'_i of chart b in chart a: exponents <m'_i, v_j>
        E = [[dot(m, v) for v in Va] for m in bases[b]]
        lifted = [[p * e for e in row] for row in E]
        if lifted != [[dot([p * x for x in m], v) for v in Va] for m in bases[b]]:
            raise FanError("lifting does not commute with a chart transition")
        transitions.append({"from": a, "to": b, "exponents": E})
    return {"cones_preserved": True, "charts": charts, "transitions": transitions}


# --- surfaces -------------------------------------------------------------------

def cyclic_order(fan: Fan):
    if fan.rank != 2:
        raise FanError("cyclic order only for surface fans")
    return angle_order(fan.rays)


def toric_surface_intersections(fan: Fan):
    """Matrix of intersection numbers ``D_i . D_j`` indexed like ``fan.rays``."""
    if fan.rank != 2:
        raise FanError("intersection numbers only implemented for surface fans")
    if not (is_smooth(fan) and is_complete(fan)):
        raise FanError("need a smooth complete surface fan")
    order = cyclic_order(fan)
    m = len(order)
    M = [[0] * m for _ in range(m)]
    for k in range(m):
        prev, cur, nxt = order[k - 1], order[k], order[(k + 1) % m]
        s = tuple(a + b for a, b in zip(fan.rays[prev], fan.rays[nxt]))
        v = fan.rays[cur]
        # s = b * v
        b = s[0] // v[0] if v[0] else s[1] // v[1]
        if tuple(b * x for x in v) != s:
            raise FanError("wheel relation failed; fan not smooth")
        M[cur][cur] = -b
        M[cur][nxt] = M[nxt][cur] = 1
    for i in range(m):
        K = [-1] * m
        if sum(M[i][j] * (int(i == j) + K[j]) for j in range(m)) != -2:
            raise FanError("adjunction check failed")
    return M


def intersect(M, a, b):
    return sum(a[i] * M[i][j] * b[j] for i in range(len(a)) for j in range(len(b)))


def canonical_divisor(fan: Fan):
    return [-1] * len(fan.rays)


# --- catalog -------------------------------------------------------------------

def _load_catalog():
    text = resources.files("froblift").joinpath("data/catalog.json").read_text()
    return json.loads(text)


_CATALOG = None


def catalog_names():
    global _CATALOG
    if _CATALOG is None:
        _CATALOG = _load_catalog()
    return list(_CATALOG)


def catalog_fan(name: str) -> Fan:
    global _CATALOG
    if _CATALOG is None:
        _CATALOG = _load_catalog()
    if name not in _CATALOG:
        raise FanError(f"unknown catalog fan {name!r}; known: {', '.join(_CATALOG)}")
    entry = _CATALOG[name]
    return Fan(entry["rays"], entry["cones"], entry.get("rank"), name=name)


def hirzebruch(n: int) -> Fan:
    return Fan([(1, 0), (0, 1), (-1, n), (0, -1)], [(0, 1), (1, 2), (2, 3), (3, 0)], name=f"F{n}")


def projective_space(n: int) -> Fan:
    rays = [tuple(int(i == j) for j in range(n)) for i in range(n)] + [tuple([-1] * n)]
    cones = [tuple(j for j in range(n + 1) if j != i) for i in range(n + 1)]
    return Fan(rays, cones, n, name=f"P{n}")


def surface_catalog_names():
    return [k for k in catalog_names() if catalog_fan(k).rank == 2 and is_complete(catalog_fan(k))]
