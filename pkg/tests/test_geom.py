from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import three_roots, model_f, model_g
from igusa2d.geom import (
    conical_subdivision,
    det,
    dot,
    face_data,
    face_function,
    geom_candidate_poles,
    geom_polygon,
    in_cone,
    kouch_check,
    parallelepiped_points,
    polygon_plot_data,
    polygon_to_json,
    subdivision_to_json,
)
from igusa2d.poly import Poly2

F_SUPPORT = {(0, 6), (2, 3), (4, 0), (4, 4)}


def test_polygon_model_f():
    P = geom_polygon(F_SUPPORT)
    assert P.vertices == ((0, 6), (4, 0))
    assert [(f.normal, f.d, f.compact) for f in P.facets] == [
        ((0, 1), 0, False), ((3, 2), 12, True), ((1, 0), 0, False)]


def test_polygon_model_g():
    P = geom_polygon(model_g(2).support())
    assert [(f.normal, f.d) for f in P.compact_facets] == [((3, 2), 18)]


def test_polygon_single_monomial():
    P = geom_polygon({(1, 1)})
    assert P.vertices == ((1, 1),) and not P.compact_facets


@pytest.mark.parametrize("a, m, pts", [((1, 1), 4, {(4, 0)}), ((2, 1), 6, {(0, 6)}),
                                       ((0, 1), 0, {(4, 0)})])
def test_face_data(a, m, pts):
    got_m, F = face_data(geom_polygon(F_SUPPORT), a)
    assert got_m == m and F.points == pts and F.kind == "vertex"


def test_simple_subdivision_model_f():
    S = conical_subdivision(geom_polygon(F_SUPPORT), "simple")
    gens = [c.generators for c in S.cones]
    assert gens == [((0, 1),), ((0, 1), (1, 1)), ((1, 1),), ((1, 1), (3, 2)), ((3, 2),),
                    ((3, 2), (2, 1)), ((2, 1),), ((2, 1), (1, 0)), ((1, 0),)]
    assert all(abs(c.det) == 1 for c in S.cones)


def test_minimal_subdivision_model_f():
    S = conical_subdivision(geom_polygon(F_SUPPORT), "minimal")
    assert S.rays == ((0, 1), (3, 2), (1, 0))
    two = [c for c in S.cones if c.dim == 2]
    assert [c.generators for c in two] == [((0, 1), (3, 2)), ((3, 2), (1, 0))]
    assert [c.det for c in two] == [-3, -2]


def test_single_monomial_subdivision():
    S = conical_subdivision(geom_polygon({(1, 1)}), "minimal")
    assert S.rays == ((0, 1), (1, 0))


def test_face_functions_model_f():
    f = model_f()
    P = geom_polygon(f.support())
    _, facet = face_data(P, (3, 2))
    assert face_function(f, facet) == Poly2({(0, 3): 1, (2, 0): -1}) ** 2
    _, v = face_data(P, (1, 1))
    assert face_function(f, v) == Poly2.mono(4, 0)
    _, axis = face_data(P, (1, 0))
    assert face_function(f, axis) == Poly2.mono(0, 6)


def test_kouch_model_f_degenerate():
    rep = kouch_check(model_f(), 5)
    assert not rep["non_degenerate"]
    facet = [r for r in rep["faces"] if r["label"] == [3, 2]][0]
    assert facet["singular_points"]


def test_kouch_smooth_binomial():
    assert kouch_check(Poly2({(1, 0): 1, (0, 1): 1}), 3)["non_degenerate"]


def test_kouch_three_roots_degenerate():
    assert not kouch_check(three_roots(2, 3), 7)["non_degenerate"]


def test_geom_candidates():
    assert geom_candidate_poles(geom_polygon(F_SUPPORT)) == {Fraction(-5, 12)}
    assert geom_candidate_poles(geom_polygon(model_g(2).support())) == {Fraction(-5, 18)}
    assert geom_candidate_poles(geom_polygon({(1, 0), (0, 1)})) == {Fraction(-2)}


def test_parallelepiped():
    assert parallelepiped_points((0, 1), (3, 2)) == [(1, 1), (2, 2), (3, 3)]


def test_emitters():
    P = geom_polygon(F_SUPPORT)
    doc = polygon_to_json(P)
    assert doc["vertices"] == [[0, 6], [4, 0]]
    assert subdivision_to_json(conical_subdivision(P))["mode"] == "minimal"
    segs = polygon_plot_data(P)
    assert segs[0] == [[0, 6], [0, 8]] and segs[-1] == [[4, 0], [6, 0]]


# -- properties ---------------------------------------------------------------------

supports = st.sets(st.tuples(st.integers(0, 7), st.integers(0, 7)), min_size=1, max_size=6).filter(
    lambda s: (0, 0) not in s)


@given(supports, st.sampled_from(["minimal", "simple"]))
def test_cones_partition_quadrant(support, mode):
    S = conical_subdivision(geom_polygon(support), mode)
    for i in range(0, 25):
        for j in range(0, 25):
            if (i, j) == (0, 0):
                continue
            assert sum(in_cone((i, j), c) for c in S.cones) == 1


@given(supports)
def test_simple_mode_unimodular(support):
    P = geom_polygon(support)
    S = conical_subdivision(P, "simple")
    normals = {f.normal for f in P.facets}
    for c in S.cones:
        assert abs(c.det) == 1
        if c.dim == 1 and c.generators[0] not in normals:
            assert c.face.kind == "vertex"


@given(supports)
def test_minimal_cones_and_facets(support):
    P = geom_polygon(support)
    S = conical_subdivision(P, "minimal")
    normals = [f.normal for f in P.facets]
    two = [c.generators for c in S.cones if c.dim == 2]
    assert two == list(zip(normals, normals[1:]))
    for fc in P.compact_facets:
        _, F = face_data(P, fc.normal)
        assert F.kind == "facet" and set(fc.endpoints) <= F.points
        assert all(dot(fc.normal, x) >= fc.d for x in P.support)


@given(supports, st.integers(1, 5), st.integers(1, 5))
def test_m_linear_on_cones(support, l1, l2):
    P = geom_polygon(support)
    for c in conical_subdivision(P, "minimal").cones:
        if c.dim != 2:
            continue
        u, w = c.generators
        k = (l1 * u[0] + l2 * w[0], l1 * u[1] + l2 * w[1])
        vF = next(iter(c.face.points))
        assert face_data(P, k)[0] == dot(k, vF)
        assert det(u, w) != 0
