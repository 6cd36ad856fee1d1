import pytest

from froblift.fan_toolkit import (catalog_fan, catalog_names, cyclic_order, Fan, fan_automorphisms,
                                  fan_from_json, FanError, hirzebruch, intersect, is_complete, is_smooth,
                                  multiplication_by_p_witness, projective_space, star_subdivision,
                                  surface_catalog_names, toric_surface_intersections)

SURFACES = surface_catalog_names()


def test_catalog_contents():
    names = catalog_names()
    for n in ("P2", "F1", "P1xP1", "Bl3P2", "P3"):
        assert n in names
    assert set(SURFACES) <= set(names)
    for name in names:
        fan = catalog_fan(name)
        assert is_smooth(fan)


@pytest.mark.parametrize("name", SURFACES)
def test_principal_divisors_are_numerically_trivial(name):
    # [DERIVED] sum <m, v_i> D_i ~ 0, so it meets every D_j in degree 0
    fan = catalog_fan(name)
    M = toric_surface_intersections(fan)
    for m in ((1, 0), (0, 1)):
        div = [m[0] * v[0] + m[1] * v[1] for v in fan.rays]
        assert all(intersect(M, div, [int(i == j) for i in range(len(fan.rays))]) == 0
                   for j in range(len(fan.rays)))


@pytest.mark.parametrize("name", SURFACES)
def test_noether_and_self_intersections(name):
    # [DERIVED] K^2 = 12 - #rays and sum D_i^2 = 12 - 3 #rays on a smooth complete toric surface
    fan = catalog_fan(name)
    M = toric_surface_intersections(fan)
    m = len(fan.rays)
    K = [-1] * m
    assert intersect(M, K, K) == 12 - m
    assert sum(M[i][i] for i in range(m)) == 12 - 3 * m


@pytest.mark.parametrize("n", [0, 1, 2, 3, 4])
def test_hirzebruch_self_intersections(n):
    M = toric_surface_intersections(hirzebruch(n))
    assert M[1][1] == -n and M[3][3] == n
    assert M[0][0] == M[2][2] == 0


def test_star_subdivision_is_blowup():
    P2 = catalog_fan("P2")
    B = star_subdivision(P2, (0, 1))
    assert len(B.rays) == 4 and (1, 1) in B.rays
    M = toric_surface_intersections(B)
    e = B.rays.index((1, 1))
    assert M[e][e] == -1
    # the strict transforms of the two lines through the point drop to 0
    assert M[0][0] == 0 and M[1][1] == 0
    with pytest.raises(FanError):
        star_subdivision(P2, (0, 2, 1))


def test_automorphism_orders():
    # [DERIVED] S_3, the dihedral group of the square, of the hexagon, and one reflection
    expected = {"P2": 6, "P1xP1": 8, "Bl3P2": 12, "F1": 2, "F2": 2}
    for name, order in expected.items():
        G = fan_automorphisms(catalog_fan(name))
        assert G.order() == order and G.is_group()
    assert fan_automorphisms(projective_space(3)).order() == 24


def test_completeness_and_smoothness():
    assert is_complete(catalog_fan("P2"))
    assert not is_complete(catalog_fan("A2"))
    weighted = Fan([(1, 0), (0, 1), (-1, -2)], [(0, 1), (1, 2), (0, 2)])
    assert is_complete(weighted) and not is_smooth(weighted)
    quarter = Fan([(1, 0), (0, 1), (-1, -1)], [(0, 1), (1, 2)])
    assert not is_complete(quarter)


def test_invalid_fans_rejected():
    with pytest.raises(FanError):
        Fan([(1, 0, 0), (0, 1, 0), (1, 1, 0), (0, 0, 1)], [(0, 1, 2, 3)])  # not simplicial
    with pytest.raises(FanError):
        Fan([(1, 0), (0, 1), (1, 2)], [(0, 1), (0, 2)])  # overlapping cones
    with pytest.raises(FanError):
        Fan([(0, 0)], [(0,)])
    with pytest.raises(FanError):
        fan_from_json({"rays": [[1, 0]]})
    with pytest.raises(FanError):
        catalog_fan("nope")


def test_rays_made_primitive():
    fan = Fan([(2, 0), (0, 3), (-1, -1)], [(0, 1), (1, 2), (0, 2)])
    assert fan.rays == ((1, 0), (0, 1), (-1, -1))
    assert fan_from_json(fan.to_json()).rays == fan.rays


@pytest.mark.parametrize("name", ["P2", "F1", "Bl3P2", "P3"])
@pytest.mark.parametrize("p", [2, 3, 5])
def test_multiplication_by_p_lifts_on_every_chart(name, p):
    w = multiplication_by_p_witness(catalog_fan(name), p)
    assert w["cones_preserved"]
    assert len(w["charts"]) == len(catalog_fan(name).max_cones)


def test_cyclic_order_is_angular():
    order = cyclic_order(catalog_fan("Bl3P2"))
    fan = catalog_fan("Bl3P2")
    import math
    angles = [math.atan2(fan.rays[i][1], fan.rays[i][0]) % (2 * math.pi) for i in order]
    assert angles == sorted(angles)
