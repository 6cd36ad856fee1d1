"""Command-line interface: ``froblift <verb> ...``.

Exit codes: 0 when every verdict is PASS (or the command is informational),
1 on a mismatch, 2 on input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from . import repro
from .classification import (classify_max_parabolic_quotients, ClassificationError, dim_G_mod_P,
                             fano_rigidity_screen, is_projective_space, load_fano_csv, parse_diagram,
                             run_descent_scenario, scripted_descent_scenarios, SurfaceDeltaState)
from .curve_restriction import (bundle_splitting_type, etale_fixed_scheme_check, LaurentTransitionMatrix,
                                nef_obstruction, restrict_log_cotangent, SemilinearMap,
                                semilinear_fixed_points, splitting_type, stabilized_fixed_points,
                                transition_from_json)
from .fan_toolkit import (catalog_fan, catalog_names, fan_automorphisms, fan_from_json, FanError,
                          is_complete, is_smooth, toric_surface_intersections)
from .fields import field, FieldError
from .forms import form_from_json, LogForm
from .frobenius_splitting import (cartier_decompose, fedder_hypersurface, invariant_splitting_search_P1,
                                  p1_invariant_coefficient, SplittingSection, splits_Pn, xi_splits_cartier)
from .polynomials import parse_poly
from .toric_cohomology import (ample_classes, bott_vanishing_log, cohomology_all,
                               global_sections, section_ring_flatness, ToricDivisor)
from .witt_frobenius import (det_poly, det_xi_divisor_Pn, FrobeniusLiftChart, int_to_witt,
                             is_compatible_divisor, standard_lifts, w2_add, w2_mul, witt_to_int,
                             WittScalar2, xi_matrix, xi_of_form)


class InputError(ValueError):
    pass


# --- helpers ------------------------------------------------------------------------

def _load_json(text):
    """Inline JSON, or ``@path`` / a path to a JSON file."""
    src = text
    if text.startswith("@") or not text.lstrip().startswith(("{", "[")):
        path = text[1:] if text.startswith("@") else text
        try:
            with open(path) as fh:
                src = fh.read()
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc}") from None
    try:
        return json.loads(src)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _vars(s):
    return tuple(v.strip() for v in s.split(",") if v.strip())


def _polys(text, F, vars):
    return [parse_poly(t, F, vars) for t in text.split(";")]


def _chart(args):
    F = field(args.q)
    vars = _vars(args.vars)
    if args.lift:
        images = _polys(args.lift, F, vars)
        return FrobeniusLiftChart(images, vars, F)
    return FrobeniusLiftChart.standard(F, vars)


def _ints(text):
    try:
        return [int(a) for a in text.replace(" ", "").split(",") if a != ""]
    except ValueError:
        raise InputError(f"expected comma-separated integers, got {text!r}") from None


def _matrix_ints(text):
    return [_ints(row) for row in text.split(";")]


def _fan(args):
    if getattr(args, "fan_json", None):
        return fan_from_json(_load_json(args.fan_json))
    return catalog_fan(args.fan)


def _form(args, F, vars, marked=()):
    if args.form:
        return form_from_json(_load_json(args.form), F)
    if args.coeffs:
        gs = _polys(args.coeffs, F, vars)
        if len(gs) != len(vars):
            raise InputError("--coeffs needs one polynomial per variable")
        return LogForm(F, vars, 1, {(i,): g for i, g in enumerate(gs)}, marked)
    raise InputError("give --form or --coeffs")


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if hasattr(x, "to_json"):
        return _jsonable(x.to_json())
    return x


# --- commands: each returns (payload, verdict) ----------------------------------------

def cmd_witt(args):
    F = field(args.q or args.p)
    if F.p != args.p:
        raise InputError(f"q={args.q} is not a power of p={args.p}")

    def w(s):
        a = _ints(s)
        if len(a) != 2:
            raise InputError(f"Witt vector needs two coordinates, got {s!r}")
        return WittScalar2(F, *a)

    if args.add:
        r = w2_add(w(args.add[0]), w(args.add[1]))
    elif args.mul:
        r = w2_mul(w(args.mul[0]), w(args.mul[1]))
    elif args.from_int is not None:
        r = int_to_witt(F, args.from_int)
    elif args.to_int:
        return {"int": witt_to_int(w(args.to_int))}, "OK"
    else:
        raise InputError("give --add, --mul, --from-int or --to-int")
    out = {"result": [r.a0, r.a1]}
    if F.k == 1:
        out["int"] = witt_to_int(r)
    return out, "OK"


def cmd_xi(args):
    chart = _chart(args)
    marked = _ints(args.marked) if args.marked else ()
    if args.form or args.coeffs:
        omega = _form(args, chart.F, chart.vars, marked)
        return {"xi": xi_of_form(chart, omega).to_json()}, "OK"
    M = xi_matrix(chart, marked)
    return {"matrix": [[str(e) for e in row] for row in M], "det": str(det_poly(M))}, "OK"


def cmd_delta_divisor(args):
    F = field(args.p)
    names = tuple(f"x{i}" for i in range(args.n + 1))
    lifts = _polys(args.lifts, F, names) if args.lifts else standard_lifts(F, args.n)
    H = det_xi_divisor_Pn(args.p, args.n, lifts)
    ok = splits_Pn(SplittingSection(args.p, args.n, H))
    return {"det_xi": str(H), "splits": ok}, "PASS" if ok else "FAIL"


def cmd_compat(args):
    chart = _chart(args)
    h = parse_poly(args.h, chart.F, chart.vars)
    w = is_compatible_divisor(chart, h, fixed_lift=args.fixed_lift)
    return {"compatible": w.compatible, "a": str(w.a) if w.a is not None else None,
            "c": str(w.c) if w.c is not None else None, "reason": w.reason}, "OK"


def cmd_fedder(args):
    F = field(args.q)
    vars = _vars(args.vars)
    f = parse_poly(args.f, F, vars)
    at = _ints(args.at) if args.at else None
    return {"f_split": fedder_hypersurface(F.p, f, at)}, "OK"


def cmd_cartier(args):
    F = field(args.q)
    vars = _vars(args.vars)
    omega = _form(args, F, vars)
    dec = cartier_decompose(F.p, omega)
    return {"image": dec.image.to_json(), "primitive": dec.primitive.to_json()}, "OK"


def cmd_split_check(args):
    if args.p1:
        coeff = p1_invariant_coefficient(args.p)
        wit = invariant_splitting_search_P1(args.p)
        return {"coefficient": coeff, "invariant_splitting": wit.to_json() if wit else None,
                "notes": wit.notes if wit else []}, "OK"
    args.q = args.q or args.p
    chart = _chart(args)
    ok = xi_splits_cartier(chart, trials=args.trials, seed=args.seed)
    return {"xi_splits": ok}, "PASS" if ok else "FAIL"


def cmd_fan(args):
    fan = _fan(args)
    out = {"rays": [list(r) for r in fan.rays], "cones": [list(c) for c in fan.max_cones],
           "smooth": is_smooth(fan), "complete": is_complete(fan)}
    if out["complete"]:
        out["automorphisms"] = fan_automorphisms(fan).order()
    if fan.rank == 2 and out["smooth"] and out["complete"]:
        out["intersections"] = toric_surface_intersections(fan)
    return out, "OK"


def _divisor(args):
    fan = _fan(args)
    return ToricDivisor(fan, _ints(args.D))


def cmd_h0(args):
    D = _divisor(args)
    pts = global_sections(D)
    out = {"h0": len(pts)}
    if args.points:
        out["points"] = [list(p) for p in pts.points]
    return out, "OK"


def cmd_hi(args):
    D = _divisor(args)
    return {"h": cohomology_all(D)}, "OK"


def cmd_bott(args):
    fan = _fan(args)
    Ds = [ToricDivisor(fan, _ints(args.D))] if args.D else ample_classes(fan, args.lo, args.hi)
    reports = [bott_vanishing_log(fan, D) for D in Ds]
    ok = all(r.vanishing for r in reports)
    return {"classes": [{"D": list(D.coeffs), "h": r.h, "vanishing": r.vanishing}
                        for D, r in zip(Ds, reports)]}, "PASS" if ok else "FAIL"


def cmd_flatness(args):
    fan = _fan(args)
    Ls = [ToricDivisor(fan, row) for row in _matrix_ints(args.L)]
    box = []
    for part in args.window.split(","):
        lo, _, hi = part.partition(":")
        box.append((int(lo), int(hi)))
    rep = section_ring_flatness(fan, Ls, box)
    return rep.to_json(), "PASS" if rep.criterion_holds else "FAIL"


def cmd_split_type(args):
    F = field(args.q)
    if args.matrix_json:
        M = transition_from_json(_load_json(args.matrix_json))
    else:
        rows = [[e.strip() for e in row.split(",")] for row in args.matrix.split(";")]
        M = LaurentTransitionMatrix.from_lists(F, rows)
    typ = splitting_type(M)
    return {"splitting_type": typ, "bundle_type": bundle_splitting_type(M),
            "nef_obstruction": nef_obstruction(typ), "det": repr(M.det())}, "OK"


def cmd_restrict(args):
    F = field(args.q)
    X = _vars(args.vars)
    S = ("s0", "s1")
    comps = _polys(args.components, F, X)
    curve = _polys(args.curve, F, S)
    res = restrict_log_cotangent(comps, curve)
    typ = splitting_type(res.matrix)
    out = res.to_json()
    out.update({"matrix_repr": repr(res.matrix), "splitting_type": typ,
                "bundle_type": bundle_splitting_type(res.matrix), "nef_obstruction": nef_obstruction(typ)})
    return out, "OK"


def cmd_fixed_points(args):
    F = field(args.q)
    if args.etale:
        vars = _vars(args.vars)
        A = [[parse_poly(e, F, vars) for e in row.split(",")] for row in args.etale.split(";")]
        pts = [_ints(p) for p in args.points.split(";")] if args.points else [[a] for a in range(F.q)]
        rep = etale_fixed_scheme_check(A, pts)
        return rep.to_json(), "PASS" if rep.ok else "FAIL"
    S = SemilinearMap(F, [[F.from_int(a) if F.k == 1 else a for a in row] for row in _matrix_ints(args.A)])
    res = semilinear_fixed_points(S, args.m) if args.m else stabilized_fixed_points(S, args.strategy, args.cap)
    return res.to_json(), "OK"


def cmd_dynkin(args):
    d = parse_diagram(args.diagram)
    out = {"diagram": str(d), "dim": dim_G_mod_P(d),
           "verdict": classify_max_parabolic_quotients(d).to_json()}
    if len(d.marked) == 1:
        out["projective_space"] = is_projective_space(d)
    return out, "OK"


def cmd_fano_screen(args):
    rows = load_fano_csv(args.csv)
    table = fano_rigidity_screen(rows)
    return table.to_json(), "OK"


def cmd_surface_descent(args):
    if args.scenario:
        obj = _load_json(args.scenario)
        try:
            fan = catalog_fan(obj["fan"]) if isinstance(obj["fan"], str) else fan_from_json(obj["fan"])
            state = SurfaceDeltaState(fan, [Fraction(str(c)) for c in obj.get("coeffs", [1] * len(fan.rays))],
                                      obj.get("extras", []))
            centers = obj["centers"]
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed scenario: {exc}") from None
        final, msg, states = run_descent_scenario(state, centers)
        return {"refusal": msg, "final": final.to_json(), "steps": len(states) - 1}, "OK"
    rows = []
    for name, state, centers, refuse in scripted_descent_scenarios():
        final, msg, _ = run_descent_scenario(state, centers)
        rows.append({"scenario": name, "refusal": msg, "expected_refusal": refuse})
    ok = all((r["refusal"] is not None) == r["expected_refusal"] for r in rows)
    return {"scenarios": rows}, "PASS" if ok else "FAIL"


def cmd_repro(args):
    names = list(repro.TARGETS) if args.target == "all" else [args.target]
    kwargs = {}
    if args.p is not None:
        if args.target != "p1-invariant-splitting":
            raise InputError("--p only applies to p1-invariant-splitting")
        kwargs["primes"] = (args.p,)
    if len(names) > 1 and args.jobs > 1:
        with ThreadPoolExecutor(args.jobs) as ex:
            checks = list(ex.map(lambda n: repro.TARGETS[n](), names))
    else:
        checks = [repro.TARGETS[n](**kwargs) for n in names]
    ok = all(c.passed for c in checks)
    return {"checks": [c.to_json() for c in checks]}, "PASS" if ok else "FAIL"


# --- parser ---------------------------------------------------------------------------

def build_parser():
    ap = argparse.ArgumentParser(prog="froblift", description=__doc__.splitlines()[0])
    ap.add_argument("--json", action="store_true", help="machine-readable output")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def chart_opts(p):
        p.add_argument("--q", type=int, required=True)
        p.add_argument("--vars", default="x,y")
        p.add_argument("--lift", help="f_i with F(x_i) = x_i^p + p f_i, separated by ';'")

    def form_opts(p):
        p.add_argument("--form", help="form JSON (inline or @file)")
        p.add_argument("--coeffs", help="1-form sum g_i dx_i as 'g_1;g_2;...'")

    def fan_opts(p):
        g = p.add_mutually_exclusive_group(required=True)
        g.add_argument("--fan", choices=catalog_names())
        g.add_argument("--fan-json", help="fan JSON (inline or @file)")

    p = sub.add_parser("witt", help="arithmetic in W_2(F_q)")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q", type=int)
    p.add_argument("--add", nargs=2, metavar="A0,A1")
    p.add_argument("--mul", nargs=2, metavar="A0,A1")
    p.add_argument("--to-int", metavar="A0,A1")
    p.add_argument("--from-int", type=int)
    p.set_defaults(fn=cmd_witt)

    p = sub.add_parser("xi", help="the map xi of a chart lifting")
    chart_opts(p)
    form_opts(p)
    p.add_argument("--marked", help="indices of log coordinates")
    p.set_defaults(fn=cmd_xi)

    p = sub.add_parser("delta-divisor", help="det xi on P^n")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--lifts", help="homogeneous f_0;...;f_n in x0..xn")
    p.set_defaults(fn=cmd_delta_divisor)

    p = sub.add_parser("compat", help="compatibility of a divisor with a lifting")
    chart_opts(p)
    p.add_argument("--h", required=True)
    p.add_argument("--fixed-lift", action="store_true")
    p.set_defaults(fn=cmd_compat)

    p = sub.add_parser("fedder", help="Fedder's criterion for a hypersurface")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--vars", default="x,y,z")
    p.add_argument("--f", required=True)
    p.add_argument("--at")
    p.set_defaults(fn=cmd_fedder)

    p = sub.add_parser("cartier", help="Cartier operator on a closed form")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--vars", default="x,y")
    form_opts(p)
    p.set_defaults(fn=cmd_cartier)

    p = sub.add_parser("split-check", help="C(xi(w)) = w on random forms, or the P^1 invariant test")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q", type=int)
    p.add_argument("--vars", default="x,y")
    p.add_argument("--lift")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--p1", action="store_true", help="translation-invariant splittings of P^1")
    p.set_defaults(fn=cmd_split_check)

    p = sub.add_parser("fan", help="fan properties")
    fan_opts(p)
    p.set_defaults(fn=cmd_fan)

    for name, fn, helptext in [("h0", cmd_h0, "global sections of O(D)"), ("hi", cmd_hi, "all h^i(O(D))")]:
        p = sub.add_parser(name, help=helptext)
        fan_opts(p)
        p.add_argument("--D", required=True, help="coefficients on the rays")
        if name == "h0":
            p.add_argument("--points", action="store_true")
        p.set_defaults(fn=fn)

    p = sub.add_parser("bott", help="log Bott vanishing for ample classes")
    fan_opts(p)
    p.add_argument("--D")
    p.add_argument("--lo", type=int, default=0)
    p.add_argument("--hi", type=int, default=4)
    p.set_defaults(fn=cmd_bott)

    p = sub.add_parser("flatness", help="h^1 over a window of combinations of line bundles")
    fan_opts(p)
    p.add_argument("--L", required=True, help="divisors 'a,b,c;d,e,f'")
    p.add_argument("--window", required=True, help="'lo:hi,lo:hi'")
    p.set_defaults(fn=cmd_flatness)

    p = sub.add_parser("split-type", help="splitting type of a Laurent transition matrix")
    p.add_argument("--q", type=int, default=5)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--matrix", help="rows ';', entries ',' e.g. 't,1;0,t^-1'")
    g.add_argument("--matrix-json")
    p.set_defaults(fn=cmd_split_type)

    p = sub.add_parser("restrict", help="log cotangent sheaf of P^2 restricted to a rational curve")
    p.add_argument("--q", type=int, default=5)
    p.add_argument("--vars", default="x,y,z")
    p.add_argument("--components", required=True, help="homogeneous components 'h1;h2'")
    p.add_argument("--curve", required=True, help="three forms in s0,s1")
    p.set_defaults(fn=cmd_restrict)

    p = sub.add_parser("fixed-points", help="fixed points of v -> A v^[p]")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--A", help="rows ';', entries ','")
    p.add_argument("--m", type=int)
    p.add_argument("--strategy", choices=["exact", "doubling"], default="exact")
    p.add_argument("--cap", type=int, default=8)
    p.add_argument("--etale", help="polynomial matrix A(x), rows ';' entries ','")
    p.add_argument("--vars", default="x")
    p.add_argument("--points", help="sample points 'a;b'")
    p.set_defaults(fn=cmd_fixed_points)

    p = sub.add_parser("dynkin", help="G/P for a marked Dynkin diagram, e.g. A3:1")
    p.add_argument("diagram")
    p.set_defaults(fn=cmd_dynkin)

    p = sub.add_parser("fano-screen", help="chi(T_X) screen of Fano threefolds")
    p.add_argument("--csv", help="table with columns id,rho,minusK3,b3[,category]")
    p.set_defaults(fn=cmd_fano_screen)

    p = sub.add_parser("surface-descent", help="Delta bookkeeping under toric blow-ups")
    p.add_argument("--scenario", help="JSON with fan, coeffs, extras, centers")
    p.set_defaults(fn=cmd_surface_descent)

    p = sub.add_parser("repro", help="canned verification targets")
    p.add_argument("target", choices=["all"] + list(repro.TARGETS))
    p.add_argument("--p", type=int)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(fn=cmd_repro)
    return ap


INPUT_ERRORS = (InputError, ValueError, KeyError, OSError, FieldError, FanError, ClassificationError)


def run(argv=None):
    """Parse and execute; returns the report dict."""
    ap = build_parser()
    args = ap.parse_args(argv)
    t0 = time.perf_counter()
    payload, verdict = args.fn(args)
    return {"command": ["froblift"] + list(argv if argv is not None else sys.argv[1:]),
            "payload": _jsonable(payload), "verdict": verdict,
            "timing": round(time.perf_counter() - t0, 4)}


def _print_human(report):
    payload = report["payload"]
    if "checks" in payload:
        for c in payload["checks"]:
            print(f"[{c['verdict']}] criterion {c['criterion']:>2}  {c['target']:<24} {c['seconds']:.3f}s")
            for n in c["notes"]:
                print(f"       note: {n}")
    else:
        for k, v in payload.items():
            print(f"{k}: {json.dumps(v) if isinstance(v, (dict, list)) else v}")
    print(f"verdict: {report['verdict']}  ({report['timing']:.3f}s)")


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        report = run(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    except INPUT_ERRORS as exc:
        msg = {"command": ["froblift"] + argv, "error": str(exc), "verdict": "ERROR"}
        if "--json" in argv:
            print(json.dumps(msg))
        else:
            print(f"error: {exc}", file=sys.stderr)
        return 2
    if "--json" in argv:
        print(json.dumps(report, indent=1))
    else:
        _print_human(report)
    return 1 if report["verdict"] == "FAIL" else 0


if __name__ == "__main__":
    sys.exit(main())
