"""Dynkin-diagram recognition of G/P, the Fano threefold rigidity screen, and
Delta-divisor bookkeeping on toric surfaces."""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from importlib import resources

from .fan_toolkit import Fan, catalog_fan, hirzebruch, is_complete, is_smooth, \
    star_subdivision, toric_surface_intersections, intersect
from .lattice import solve_q


class ClassificationError(ValueError):
    pass


# --- root systems ---------------------------------------------------------------

MIN_RANK = {"A": 1, "B": 2, "C": 2, "D": 4}
EXCEPTIONAL = {"E": (6, 7, 8), "F": (4,), "G": (2,)}
MAX_RANK = 8


def cartan_matrix(typ: str, n: int):
    """Cartan matrix ``A[i][j] = <alpha_i, alpha_j^vee>`` in Bourbaki/Humphreys numbering."""
    typ = typ.upper()
    _check_rank(typ, n)
    A = [[2 if i == j else 0 for j in range(n)] for i in range(n)]

    def link(i, j, a=-1, b=-1):
        A[i][j], A[j][i] = a, b

    if typ in "ABCD":
        chain = n - 1 if typ != "D" else n - 2
        for i in range(chain):
            link(i, i + 1)
        if typ == "B":
            link(n - 2, n - 1, -2, -1)
        elif typ == "C":
            link(n - 2, n - 1, -1, -2)
        elif typ == "D":
            link(n - 3, n - 1)
    elif typ == "E":
        link(0, 2)
        link(1, 3)
        for i in range(2, n - 1):
            link(i, i + 1)
    elif typ == "F":
        link(0, 1)
        link(1, 2, -2, -1)
        link(2, 3)
    elif typ == "G":
        link(0, 1, -1, -3)
    return A


def _check_rank(typ, n):
    if typ in MIN_RANK:
        if not MIN_RANK[typ] <= n <= MAX_RANK:
            raise ClassificationError(f"type {typ} needs rank {MIN_RANK[typ]}..{MAX_RANK}, got {n}")
    elif typ in EXCEPTIONAL:
        if n not in EXCEPTIONAL[typ]:
            raise ClassificationError(f"type {typ} exists only in ranks {EXCEPTIONAL[typ]}")
    else:
        raise ClassificationError(f"unknown Dynkin type {typ!r}")


def positive_roots(typ: str, n: int):
    """Positive roots as coefficient tuples in the simple roots, via root strings."""
    A = cartan_matrix(typ, n)
    simple = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    roots = set(simple)
    layer = list(simple)
    while layer:
        nxt = []
        for beta in layer:
            for i in range(n):
                # alpha_i-string through beta: beta - q alpha_i, ..., beta + p alpha_i
                q = 0
                while True:
                    cand = tuple(b - (q + 1) * (k == i) for k, b in enumerate(beta))
                    if cand in roots:
                        q += 1
                    else:
                        break
                pairing = sum(beta[j] * A[j][i] for j in range(n))
                if q - pairing > 0:
                    new = tuple(b + (k == i) for k, b in enumerate(beta))
                    if new not in roots:
                        roots.add(new)
                        nxt.append(new)
        layer = nxt
    return sorted(roots, key=lambda r: (sum(r), r))


@dataclass(frozen=True)
class MarkedDynkinDiagram:
    """Dynkin diagram with marked (crossed) nodes; ``G/P`` has ``P`` given by the marked nodes."""

    typ: str
    n: int
    marked: tuple

    def __post_init__(self):
        object.__setattr__(self, "typ", self.typ.upper())
        _check_rank(self.typ, self.n)
        m = tuple(sorted(set(int(a) for a in self.marked)))
        if not m:
            raise ClassificationError("at least one node must be marked")
        if any(not 1 <= a <= self.n for a in m):
            raise ClassificationError(f"marked nodes must lie in 1..{self.n}")
        object.__setattr__(self, "marked", m)

    def __str__(self):
        return f"{self.typ}{self.n}:" + ",".join(map(str, self.marked))

    def canonical(self):
        """``B_2`` is ``C_2`` with the nodes swapped."""
        if self.typ == "B" and self.n == 2:
            return MarkedDynkinDiagram("C", 2, tuple(3 - a for a in self.marked))
        return self


def parse_diagram(text: str) -> MarkedDynkinDiagram:
    m = re.fullmatch(r"\s*([A-Ga-g])\s*(\d+)\s*:\s*(\d+(?:\s*,\s*\d+)*)\s*", text)
    if not m:
        raise ClassificationError(f"cannot parse diagram {text!r} (expected e.g. 'A3:1' or 'A2:1,2')")
    marked = tuple(int(a) for a in m.group(3).split(","))
    if len(set(marked)) != len(marked):
        raise ClassificationError(f"repeated marked node in {text!r}")
    return MarkedDynkinDiagram(m.group(1), int(m.group(2)), marked)


def dim_G_mod_P(d: MarkedDynkinDiagram) -> int:
    """Number of positive roots with a nonzero coefficient on some marked node."""
    idx = [a - 1 for a in d.marked]
    return sum(1 for r in positive_roots(d.typ, d.n) if any(r[i] for i in idx))


def is_projective_space(d: MarkedDynkinDiagram):
    """``r`` if ``G/P = P^r`` for a single marked node, else None."""
    if len(d.marked) != 1:
        raise ClassificationError("is_projective_space needs exactly one marked node")
    c = d.canonical()
    a = c.marked[0]
    r = None
    if c.typ == "A" and a in (1, c.n):
        r = c.n
    elif c.typ == "C" and a == 1:
        r = 2 * c.n - 1
    if r is not None and dim_G_mod_P(c) != r:
        raise ClassificationError(f"dimension mismatch for {d}")
    return r


@dataclass(frozen=True)
class Verdict:
    kind: str
    n: int | None = None
    reason: str = ""

    def __str__(self):
        return f"{self.kind}({self.n})" if self.n is not None else self.kind

    def to_json(self):
        return {"kind": self.kind, "n": self.n, "reason": self.reason}


def classify_max_parabolic_quotients(d: MarkedDynkinDiagram) -> Verdict:
    """ProjSpace / Incidence / Neither from the maximal parabolics containing ``P``."""
    c = d.canonical()
    for a in c.marked:
        single = MarkedDynkinDiagram(c.typ, c.n, (a,))
        if is_projective_space(single) is None:
            return Verdict("Neither", None, f"G/P for node {a} of {c.typ}{c.n} is not a projective space")
    if len(c.marked) == 1:
        return Verdict("ProjSpace", is_projective_space(c), "")
    if c.typ == "A" and c.marked == (1, c.n) and c.n >= 2:
        return Verdict("Incidence", c.n, "")
    return Verdict("Neither", None, "flag variety other than the point-hyperplane incidence")


def all_diagrams(max_rank: int = 6):
    """Canonical types of rank <= max_rank (``B_2`` is listed as ``C_2``)."""
    out = []
    for typ in "ABCD":
        lo = 3 if typ == "B" else MIN_RANK[typ]
        out += [(typ, n) for n in range(lo, max_rank + 1)]
    for typ, ranks in EXCEPTIONAL.items():
        out += [(typ, n) for n in ranks if n <= max_rank]
    return out


# --- Fano threefolds -------------------------------------------------------------

CATEGORIES = (
    "non-rigid curve", "negative virtual dimension", "blow-up on product", "violating Bott",
    "conic", "mapping to non-liftable", "toric", "other",
)


@dataclass(frozen=True)
class FanoInvariants:
    id: str
    rho: int
    minus_K_cubed: int
    b3: int
    category: str | None = None

    def __post_init__(self):
        if self.rho < 1:
            raise ClassificationError(f"{self.id}: Picard rank must be positive")
        if self.minus_K_cubed <= 0:
            raise ClassificationError(f"{self.id}: -K^3 must be positive")
        if self.b3 < 0 or self.b3 % 2:
            raise ClassificationError(f"{self.id}: b3 must be even and nonnegative")

    def chi_tangent(self) -> Fraction:
        """Hirzebruch-Riemann-Roch with ``c1 c2 = 24`` and ``c3 = 2 + 2 rho - b3``."""
        return Fraction(self.minus_K_cubed, 2) - 18 + self.rho - Fraction(self.b3, 2)


def load_fano_csv(source=None):
    """Rows from a CSV (path, text or file object); the shipped table by default."""
    if source is None:
        text = resources.files("froblift").joinpath("data/fano_threefolds.csv").read_text()
        name = "fano_threefolds.csv"
    elif hasattr(source, "read"):
        text, name = source.read(), getattr(source, "name", "<stream>")
    elif "\n" in str(source):
        text, name = str(source), "<text>"
    else:
        with open(source) as fh:
            text, name = fh.read(), str(source)
    lines = [ln for ln in text.splitlines()]
    data = [(i + 1, ln) for i, ln in enumerate(lines) if ln.strip() and not ln.lstrip().startswith("#")]
    if not data:
        raise ClassificationError(f"{name}: empty table")
    header_line, header = data[0]
    cols = [c.strip() for c in next(csv.reader([header]))]
    required = ["id", "rho", "minusK3", "b3"]
    if any(c not in cols for c in required):
        raise ClassificationError(f"{name}:{header_line}: header must contain {','.join(required)}")
    rows, seen = [], set()
    for lineno, ln in data[1:]:
        vals = next(csv.reader([ln]))
        if len(vals) != len(cols):
            raise ClassificationError(f"{name}:{lineno}: expected {len(cols)} fields, got {len(vals)}")
        rec = dict(zip(cols, (v.strip() for v in vals)))
        try:
            row = FanoInvariants(rec["id"], int(rec["rho"]), int(rec["minusK3"]), int(rec["b3"]),
                                 rec.get("category") or None)
        except ValueError as exc:
            raise ClassificationError(f"{name}:{lineno}: {exc}") from None
        if row.category is not None and row.category not in CATEGORIES:
            raise ClassificationError(f"{name}:{lineno}: unknown category {row.category!r}")
        if row.id in seen:
            raise ClassificationError(f"{name}:{lineno}: duplicate id {row.id}")
        seen.add(row.id)
        rows.append(row)
    return rows


@dataclass
class ScreenRow:
    row: FanoInvariants
    chi: Fraction
    flagged: bool
    verdict: str

    def to_json(self):
        return {"id": self.row.id, "rho": self.row.rho, "minusK3": self.row.minus_K_cubed,
                "b3": self.row.b3, "category": self.row.category, "chi": str(self.chi),
                "flagged": self.flagged, "verdict": self.verdict}


@dataclass
class ScreenTable:
    rows: list
    partition: dict = dc_field(default_factory=dict)

    @property
    def flagged_ids(self):
        return [r.row.id for r in self.rows if r.flagged]

    def to_json(self):
        return {"rows": [r.to_json() for r in self.rows], "flagged": self.flagged_ids,
                "partition": self.partition}


def fano_rigidity_screen(rows) -> ScreenTable:
    """``chi(T_X)`` per row; negative values are flagged as not F-liftable."""
    out = []
    partition = {}
    for row in rows:
        chi = row.chi_tangent()
        flagged = chi < 0
        if flagged:
            verdict = "not F-liftable (non-rigid)"
        elif row.category == "other":
            verdict = "requires external argument"
        elif row.category == "toric":
            verdict = "toric"
        else:
            verdict = "not decided by chi"
        out.append(ScreenRow(row, chi, flagged, verdict))
        if row.category:
            partition.setdefault(row.category, []).append(row.id)
    return ScreenTable(out, partition)


def expand_ids(text: str):
    """``'1.1-1.3, 4.2'`` to a list of ids."""
    out = []
    for part in text.replace("--", "-").split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part:
            a, b = part.split("-")
            ra, na = a.split(".")
            rb, nb = b.split(".") if "." in b else (ra, b)
            if ra != rb:
                raise ClassificationError(f"range {part!r} crosses Picard ranks")
            out += [f"{ra}.{k}" for k in range(int(na), int(nb) + 1)]
        else:
            out.append(part)
    return out


# --- Delta-divisors on toric surfaces ---------------------------------------------

class DescentRefusal(Exception):
    """The requested blow-up is incompatible with a Frobenius lifting."""


@dataclass
class SurfaceDeltaState:
    """``Delta = sum c_i D_i + sum e_k E_k``; ``extras`` hold ``(name, coeff, class)``
    with ``class`` an integer combination of the ray divisors."""

    fan: Fan
    coeffs: list
    extras: list = dc_field(default_factory=list)
    history: list = dc_field(default_factory=list)

    def __post_init__(self):
        if self.fan.rank != 2 or not is_smooth(self.fan) or not is_complete(self.fan):
            raise ClassificationError("surface state needs a smooth complete 2-dimensional fan")
        self.coeffs = [Fraction(c) for c in self.coeffs]
        if len(self.coeffs) != len(self.fan.rays):
            raise ClassificationError("one coefficient per ray is required")
        self.extras = [(str(n), Fraction(e), [int(a) for a in cl]) for n, e, cl in self.extras]
        for _, _, cl in self.extras:
            if len(cl) != len(self.fan.rays):
                raise ClassificationError("extra component classes need one entry per ray")

    def coefficient_bounds_ok(self) -> bool:
        vals = list(self.coeffs) + [e for _, e, _ in self.extras]
        return all(0 <= c <= 1 for c in vals) and all(e > 0 for _, e, _ in self.extras)

    def class_vector(self):
        v = list(self.coeffs)
        for _, e, cl in self.extras:
            v = [a + e * b for a, b in zip(v, cl)]
        return v

    def anticanonical(self) -> bool:
        """``Delta ~_Q -K``: the difference with ``sum D_i`` is ``div(chi^m)`` for rational ``m``."""
        diff = [c - 1 for c in self.class_vector()]
        return solve_q([list(r) for r in self.fan.rays], diff) is not None

    def floor_components(self):
        return [i for i, c in enumerate(self.coeffs) if c == 1]

    def check(self):
        if not self.coefficient_bounds_ok():
            raise ClassificationError("Delta coefficients must lie in (0, 1]")
        if not self.anticanonical():
            raise ClassificationError("Delta is not Q-linearly equivalent to -K")

    def to_json(self):
        return {"rays": [list(r) for r in self.fan.rays], "cones": [list(c) for c in self.fan.max_cones],
                "coeffs": [str(c) for c in self.coeffs],
                "extras": [[n, str(e), cl] for n, e, cl in self.extras], "history": self.history}


def boundary_state(fan: Fan) -> SurfaceDeltaState:
    return SurfaceDeltaState(fan, [1] * len(fan.rays))


def _fixed_point_cone(fan, pair):
    c = tuple(sorted(int(i) for i in pair))
    if c not in fan.max_cones:
        raise ClassificationError(f"{list(pair)} is not a torus-fixed point (maximal cone) of the fan")
    return c


def blowup_delta_descent(state: SurfaceDeltaState, center) -> SurfaceDeltaState:
    """Blow up ``center`` and compute ``Delta_Y = pi^* Delta_X - E``.

    ``center``: ``{"kind": "fixed", "cone": [i, j]}`` (torus-fixed point),
    ``{"kind": "boundary", "ray": i}`` (general point of ``D_i``) or
    ``{"kind": "general"}`` (point of the open torus).  Extra components
    are assumed to avoid the center.  Since ``Supp Delta`` has simple normal
    crossings at these points, ``E`` acquires coefficient ``mult_x Delta - 1``;
    a Frobenius lifting needs this to be 1, i.e. ``x`` a node of
    ``floor(Delta)``.  Anything else raises :class:`DescentRefusal`.
    """
    state.check()
    fan = state.fan
    kind = center.get("kind") if isinstance(center, dict) else None
    if kind == "fixed":
        cone = _fixed_point_cone(fan, center.get("cone", ()))
        mult = sum(state.coeffs[i] for i in cone)
        on_floor = [i for i in cone if state.coeffs[i] == 1]
    elif kind == "boundary":
        i = center.get("ray")
        if not isinstance(i, int) or not 0 <= i < len(fan.rays):
            raise ClassificationError(f"ray index {i!r} outside the surface")
        mult = state.coeffs[i]
        on_floor = [i] if state.coeffs[i] == 1 else []
    elif kind == "general":
        mult, on_floor = Fraction(0), []
    else:
        raise ClassificationError(f"unknown center {center!r}")

    if len(on_floor) == 1:
        raise DescentRefusal("center is a smooth point of floor(Delta); a Frobenius lifting "
                             "requires a singular point of floor(Delta)")
    if mult != 2:
        raise DescentRefusal(f"multiplicity of Delta at the center is {mult}, but the exceptional "
                             "curve needs coefficient mult - 1 = 1")
    new_fan = star_subdivision(fan, cone)
    new_index = len(new_fan.rays) - 1
    # strict transforms keep their coefficients; rays of the old fan keep their indices
    coeffs = list(state.coeffs) + [mult - 1]
    extras = []
    for name, e, cl in state.extras:
        extras.append((name, e, list(cl) + [sum(cl[i] for i in cone)]))
    history = list(state.history) + [{"blowup": list(cone), "new_ray": list(new_fan.rays[new_index]),
                                      "E_coefficient": str(mult - 1)}]
    new = SurfaceDeltaState(new_fan, coeffs, extras, history)
    new.check()
    return new


def hirzebruch_delta_constraints(n: int, vertical=(1, 1)):
    """Intersection identities for ``Delta = Delta' + C + Delta^v`` on ``F_n``.

    ``vertical`` lists coefficients of ``Delta^v`` on distinct fibres; only
    its degree matters numerically.  Uses the fan ``(1,0),(0,1),(-1,n),(0,-1)``
    where ``D_1`` is the negative section ``C`` and ``D_0 ~ D_2`` are fibres.
    """
    if n < 0:
        raise ClassificationError("n must be nonnegative")
    fan = hirzebruch(n)
    M = toric_surface_intersections(fan)
    idx = {r: i for i, r in enumerate(fan.rays)}
    fibre = idx[(1, 0)]
    section = idx[(0, 1)]
    G = [int(i == fibre) for i in range(4)]
    C = [int(i == section) for i in range(4)]
    minus_K = [1, 1, 1, 1]
    dv = sum(Fraction(a) for a in vertical)
    delta_v = [dv * g for g in G]
    delta_prime = [k - c - v for k, c, v in zip(minus_K, C, delta_v)]
    out = {
        "n": n,
        "C.C": intersect(M, C, C),
        "G.G": intersect(M, G, G),
        "-K.C": intersect(M, minus_K, C),
        "Delta^v.C": intersect(M, delta_v, C),
        "Delta'.C": intersect(M, delta_prime, C),
        "Delta'.G": intersect(M, delta_prime, G),
    }
    out["Delta'.C"] = Fraction(out["Delta'.C"])
    out["Delta'.G"] = Fraction(out["Delta'.G"])
    out["holds"] = out["Delta'.C"] == 0 and out["Delta'.G"] == 1
    if n == 0:
        # F_0 = P^1 x P^1: Delta ~ -K = pr_1^*(2 pt) + pr_2^*(2 pt)
        S = [int(i == idx[(0, -1)]) for i in range(4)]
        out["product"] = {
            "Delta.G": intersect(M, minus_K, G),
            "Delta.S": intersect(M, minus_K, S),
            "decomposes": intersect(M, minus_K, G) == 2 and intersect(M, minus_K, S) == 2,
        }
        out["holds"] = out["holds"] and out["product"]["decomposes"]
    for k in ("Delta'.C", "Delta'.G"):
        out[k] = str(out[k])
    return out


def scripted_descent_scenarios():
    """Twenty blow-up scenarios ``(name, start_state, centers, expect_refusal)``."""
    P2, F0, F1 = catalog_fan("P2"), catalog_fan("F0"), catalog_fan("F1")
    half = Fraction(1, 2)
    sc = []

    def add(name, state, centers, refuse):
        sc.append((name, state, centers, refuse))

    for c in P2.max_cones:
        add(f"P2 node {list(c)}", boundary_state(P2), [{"kind": "fixed", "cone": list(c)}], False)
    for i in range(3):
        add(f"P2 smooth point of D{i}", boundary_state(P2), [{"kind": "boundary", "ray": i}], True)
    add("P2 general point", boundary_state(P2), [{"kind": "general"}], True)
    for c in F0.max_cones:
        add(f"F0 corner {list(c)}", boundary_state(F0), [{"kind": "fixed", "cone": list(c)}], False)
    add("F0 smooth point of D1", boundary_state(F0), [{"kind": "boundary", "ray": 1}], True)
    add("F0 general point", boundary_state(F0), [{"kind": "general"}], True)
    add("F2 node", boundary_state(catalog_fan("F2")), [{"kind": "fixed", "cone": [0, 1]}], False)
    add("P2 two successive nodes", boundary_state(P2),
        [{"kind": "fixed", "cone": [0, 1]}, {"kind": "fixed", "cone": [1, 3]}], False)
    add("P2 three nodes to hexagon", boundary_state(P2),
        [{"kind": "fixed", "cone": [0, 1]}, {"kind": "fixed", "cone": [1, 2]}, {"kind": "fixed", "cone": [0, 2]}],
        False)
    add("F1 node then smooth point of E", boundary_state(F1),
        [{"kind": "fixed", "cone": [0, 1]}, {"kind": "boundary", "ray": 4}], True)
    # Delta = D0 + D1 + conic/2 + D2/2 ... with a half-weight line: node only where both weights are 1
    st = SurfaceDeltaState(P2, [1, 1, half], [("line", half, [1, 0, 0])])
    add("P2 half-weight line: node of floor", st, [{"kind": "fixed", "cone": [0, 1]}], False)
    add("P2 half-weight line: mixed corner", st, [{"kind": "fixed", "cone": [0, 2]}], True)
    add("P2 half-weight line: half point", st, [{"kind": "boundary", "ray": 2}], True)
    return sc


def run_descent_scenario(state, centers):
    """Apply blow-ups in order; returns ``(final_state, refusal_message or None, states)``."""
    states = [state]
    try:
        for c in centers:
            state = blowup_delta_descent(state, c)
            states.append(state)
    except DescentRefusal as exc:
        return state, str(exc), states
    return state, None, states
