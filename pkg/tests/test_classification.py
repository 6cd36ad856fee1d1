import io
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from froblift.classification import (all_diagrams, blowup_delta_descent, boundary_state, cartan_matrix,
                                     classify_max_parabolic_quotients, ClassificationError, DescentRefusal,
                                     dim_G_mod_P, expand_ids, fano_rigidity_screen, FanoInvariants,
                                     hirzebruch_delta_constraints, is_projective_space, load_fano_csv,
                                     MarkedDynkinDiagram, parse_diagram, positive_roots,
                                     run_descent_scenario, scripted_descent_scenarios, SurfaceDeltaState)
from froblift.fan_toolkit import catalog_fan

# --- root systems ------------------------------------------------------------------------------

ROOT_COUNTS = [("A", n, n * (n + 1) // 2) for n in range(1, 8)] + \
    [("B", n, n * n) for n in range(2, 8)] + [("C", n, n * n) for n in range(2, 8)] + \
    [("D", n, n * (n - 1)) for n in range(4, 8)] + \
    [("E", 6, 36), ("E", 7, 63), ("E", 8, 120), ("F", 4, 24), ("G", 2, 6)]


@pytest.mark.parametrize("typ,n,count", ROOT_COUNTS)
def test_positive_root_counts(typ, n, count):
    # [DERIVED] |Phi^+| from the standard tables
    assert len(positive_roots(typ, n)) == count


@pytest.mark.parametrize("typ,n", [("A", 4), ("B", 3), ("C", 3), ("D", 5), ("E", 6), ("F", 4), ("G", 2)])
def test_cartan_matrix_shape(typ, n):
    A = cartan_matrix(typ, n)
    assert all(A[i][i] == 2 for i in range(n))
    assert all((A[i][j] == 0) == (A[j][i] == 0) for i in range(n) for j in range(n))


@pytest.mark.parametrize("bad", [("A", 0), ("D", 3), ("E", 5), ("F", 3), ("X", 2), ("A", 9)])
def test_cartan_matrix_rejects(bad):
    with pytest.raises(ClassificationError):
        cartan_matrix(*bad)


@given(n=st.integers(1, 8), data=st.data())
def test_grassmannian_dimension(n, data):
    # [DERIVED] dim Gr(a, n + 1) = a (n + 1 - a)
    a = data.draw(st.integers(1, n))
    assert dim_G_mod_P(MarkedDynkinDiagram("A", n, (a,))) == a * (n + 1 - a)


@pytest.mark.parametrize("text,dim", [
    ("C3:1", 5), ("B3:1", 5), ("D5:1", 8), ("D5:5", 10), ("E6:1", 16), ("E7:7", 27), ("E8:8", 57),
    ("F4:4", 15), ("G2:1", 5), ("A3:1,3", 5), ("A2:1,2", 3)])
def test_homogeneous_space_dimensions(text, dim):
    # [DERIVED] quadrics, spinor varieties, Cayley plane, Freudenthal variety, flag varieties
    assert dim_G_mod_P(parse_diagram(text)) == dim


def test_projective_space_recognition():
    assert is_projective_space(parse_diagram("A4:1")) == 4
    assert is_projective_space(parse_diagram("A4:4")) == 4
    assert is_projective_space(parse_diagram("C4:1")) == 7
    assert is_projective_space(parse_diagram("A4:2")) is None
    assert is_projective_space(parse_diagram("B3:1")) is None  # a quadric, not P^5
    # B_2 = C_2 with the nodes exchanged: the short-root node gives P^3
    assert is_projective_space(parse_diagram("B2:2")) == 3


def test_two_node_verdicts():
    assert classify_max_parabolic_quotients(parse_diagram("A3:1,3")).kind == "Incidence"
    assert classify_max_parabolic_quotients(parse_diagram("A3:1,2")).kind == "Neither"
    assert classify_max_parabolic_quotients(parse_diagram("C3:1")).kind == "ProjSpace"


def test_enumeration_covers_each_diagram_once():
    diags = list(all_diagrams(6))
    assert len(diags) == len(set(diags))
    assert ("E", 6) in diags and ("B", 2) not in diags and ("C", 2) in diags


@pytest.mark.parametrize("bad", ["A3", "A3:0", "A3:4", "Q2:1", "A3:1,1", ""])
def test_parse_diagram_rejects(bad):
    with pytest.raises(ClassificationError):
        parse_diagram(bad)


# --- Fano screen ---------------------------------------------------------------------------------

def test_chi_of_homogeneous_threefolds():
    # [PAPER] chi(T_P3) = 15; [DERIVED] chi(T) = dim Aut for P^3, Q, P^1 x P^2, (P^1)^3
    assert FanoInvariants("P3", 1, 64, 0).chi_tangent() == 15
    rows = {r.id: r for r in load_fano_csv()}
    assert rows["1.17"].chi_tangent() == 15
    assert rows["1.16"].chi_tangent() == 10
    assert rows["2.34"].chi_tangent() == 11
    assert rows["3.27"].chi_tangent() == 9
    # V_22 has six moduli and finite automorphisms
    assert rows["1.10"].chi_tangent() == -6


@pytest.mark.parametrize("rid,d", [("5.4", 5), ("5.5", 4), ("5.6", 3), ("5.7", 2), ("5.8", 1)])
def test_products_with_del_pezzo_surfaces(rid, d):
    # [DERIVED] chi(T_{P^1 x S}) = chi(T_P1) + chi(T_S) = 3 + (2d - 10)
    row = {r.id: r for r in load_fano_csv()}[rid]
    assert (row.rho, row.minus_K_cubed) == (11 - d, 6 * d)
    assert row.chi_tangent() == 2 * d - 7


def test_shipped_table_shape():
    rows = load_fano_csv()
    ids = [r.id for r in rows]
    assert len(rows) == 104 and "4.13" not in ids
    assert {r.rho for r in rows} == set(range(1, 11))
    assert all(r.category for r in rows)


def test_screen_flags_negative_rows():
    rows = [FanoInvariants("a.1", 1, 2, 104), FanoInvariants("a.2", 1, 64, 0, "toric"),
            FanoInvariants("a.3", 2, 54, 0, "other")]
    table = fano_rigidity_screen(rows)
    assert table.flagged_ids == ["a.1"]
    assert [r.verdict for r in table.rows][1:] == ["toric", "requires external argument"]
    assert table.partition == {"toric": ["a.2"], "other": ["a.3"]}


@given(rho=st.integers(1, 10), k3=st.integers(1, 64), h12=st.integers(0, 52))
def test_chi_formula_is_affine(rho, k3, h12):
    chi = FanoInvariants("x", rho, 2 * k3, 2 * h12).chi_tangent()
    assert chi == k3 - 18 + rho - h12
    assert isinstance(chi, Fraction)


@pytest.mark.parametrize("text,msg", [
    ("id,rho,minusK3,b3\n1.1,1,2\n", ":2: expected 4 fields"),
    ("id,rho,minusK3,b3\n1.1,1,x,0\n", ":2:"),
    ("id,rho,minusK3,b3,category\n1.1,1,2,0,weird\n", "unknown category"),
    ("id,rho,minusK3,b3\n1.1,1,2,0\n1.1,1,4,0\n", ":3: duplicate id"),
    ("id,rho,b3\n1.1,1,0\n", "header"),
    ("# only comments\n", "empty"),
    ("id,rho,minusK3,b3\n1.1,1,2,3\n", "even"),
])
def test_csv_errors_name_the_line(text, msg):
    with pytest.raises(ClassificationError, match=msg):
        load_fano_csv(text)


def test_csv_from_stream_and_path(tmp_path):
    text = "# comment\nid,rho,minusK3,b3\n9.9,2,40,0\n"
    assert load_fano_csv(io.StringIO(text))[0].id == "9.9"
    path = tmp_path / "t.csv"
    path.write_text(text)
    assert load_fano_csv(str(path))[0].minus_K_cubed == 40


def test_expand_ids():
    assert expand_ids("1.1-1.3, 4.2") == ["1.1", "1.2", "1.3", "4.2"]
    assert len(expand_ids("2.1-2.25")) == 25
    with pytest.raises(ClassificationError):
        expand_ids("1.1-2.3")


# --- Delta under toric blow-ups ------------------------------------------------------------

def test_scripted_scenarios():
    scenarios = scripted_descent_scenarios()
    assert len(scenarios) == 20
    assert any(refuse for *_, refuse in scenarios) and not all(refuse for *_, refuse in scenarios)
    for name, state, centers, refuse in scenarios:
        final, msg, states = run_descent_scenario(state, centers)
        assert (msg is not None) == refuse, name
        assert all(s.coefficient_bounds_ok() and s.anticanonical() for s in states), name


@pytest.mark.parametrize("name", ["P2", "P1xP1", "F1", "Bl3P2"])
def test_nodal_blowup_keeps_boundary(name):
    state = boundary_state(catalog_fan(name))
    cone = list(state.fan.max_cones[0])
    new = blowup_delta_descent(state, {"kind": "fixed", "cone": cone})
    assert len(new.fan.rays) == len(state.fan.rays) + 1
    assert all(c == 1 for c in new.coeffs)
    assert new.anticanonical() and new.coefficient_bounds_ok()


@pytest.mark.parametrize("center", [{"kind": "boundary", "ray": 0}, {"kind": "general"}])
def test_non_nodal_centres_refused(center):
    with pytest.raises(DescentRefusal):
        blowup_delta_descent(boundary_state(catalog_fan("P2")), center)


def test_bad_centre_descriptions():
    state = boundary_state(catalog_fan("P2"))
    with pytest.raises(ClassificationError):
        blowup_delta_descent(state, {"kind": "fixed", "cone": [0, 7]})
    with pytest.raises(ClassificationError):
        blowup_delta_descent(state, {"kind": "elsewhere"})


def test_state_rejects_non_anticanonical():
    fan = catalog_fan("P2")
    with pytest.raises(ClassificationError):
        SurfaceDeltaState(fan, [Fraction(1), Fraction(1), Fraction(1, 2)], []).check()


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_hirzebruch_constraints(n):
    r = hirzebruch_delta_constraints(n)
    assert r["holds"]
    assert r["C.C"] == -n
    assert r["Delta'.C"] == "0" and r["Delta'.G"] == "1"
