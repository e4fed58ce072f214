import json
from fractions import Fraction

import pytest

from pdwtile.chart import (
    Chart,
    ChartError,
    area_sum,
    build_A,
    build_P,
    build_Q,
    chart_class_key,
    chart_from_json,
    chart_to_json,
    check_tile_shapes,
    conjugate,
    constraints,
    face_chirality,
    mirror_chart,
    same_chart,
    transport,
    vertex_types,
)
from pdwtile.feasibility import evaluate_chart
from pdwtile.linsys import solve
from pdwtile.maps import automorphisms, make_pdw


def _types(C):
    return sorted({vt.counts for vt in vertex_types(C)})


@pytest.mark.parametrize("F", [6, 8, 10, 12, 16])
def test_P_types(F):
    C = build_P(F)
    check_tile_shapes(C)
    assert _types(C) == sorted({(0, F // 2, 0, 0), (1, 0, 1, 1)})
    fz = solve(constraints(C))
    assert fz.feasible
    assert fz.sample[1] == Fraction(4, F)


@pytest.mark.parametrize("F", [8, 12, 16])
def test_Q_types(F):
    C = build_Q(F)
    check_tile_shapes(C)
    assert (0, F // 4, F // 4, 0) in _types(C)


def test_A_types():
    C = build_A()
    check_tile_shapes(C)
    assert _types(C) == sorted({(2, 2, 0, 2), (0, 2, 1, 0), (1, 0, 1, 1)})
    with pytest.raises(ChartError):
        build_A(8)


def test_area_sum():
    assert area_sum(12) == Fraction(7, 3)
    assert area_sum(6) == Fraction(8, 3)


def test_every_face_has_one_b_edge():
    M = make_pdw(8)
    with pytest.raises(ChartError):
        Chart.from_placement(M, [], [1] * 8)


@pytest.mark.parametrize("build", [lambda: build_P(12), lambda: build_Q(12), build_A, lambda: build_P(10, 4)])
def test_json_round_trip(build):
    C = build()
    text = json.dumps(chart_to_json(C, note="x"))
    D = chart_from_json(text)
    # edge ids may be renumbered; vertex ids are kept
    M, N = C.map, D.map
    assert all(D.L[N.edge_between(*M.edge_ends(e))] == C.L[e] for e in range(M.n_edges))
    assert all(D.K[N.dart_between(M.tail[d], M.head(d))] == C.K[d] for d in range(M.n_darts))
    assert chart_class_key(D, mirror=False) == chart_class_key(C, mirror=False) and D.name == C.name
    assert json.dumps(chart_to_json(D, note="x")) == text


def test_json_schema_checked():
    obj = chart_to_json(build_P(8))
    obj["schema"] = "other/1"
    with pytest.raises(ChartError):
        chart_from_json(obj)


def test_conjugate_and_mirror_are_involutions():
    for C in (build_P(12), build_Q(12), build_A()):
        CC = conjugate(conjugate(C))
        assert CC.K == C.K and CC.chirality == C.chirality
        MM = mirror_chart(mirror_chart(C))
        assert MM.map == C.map and MM.K == C.K and MM.L == C.L and MM.chirality == C.chirality
        check_tile_shapes(mirror_chart(C))
        assert [face_chirality(mirror_chart(C), f) for f in range(len(C.map.faces()))] == list(
            mirror_chart(C).chirality)


def test_symmetric_images_are_same_chart():
    C = build_A()
    for g in automorphisms(C.map):
        D = transport(C, g)
        check_tile_shapes(D)
        assert same_chart(C, D, mirror=False)
        assert sorted(map(str, vertex_types(D))) == sorted(map(str, vertex_types(C)))


def test_class_keys_separate_named_charts():
    keys = {chart_class_key(C, True, True) for C in (build_P(12), build_Q(12), build_A())}
    assert len(keys) == 3
    assert chart_class_key(build_P(12), True, True) == chart_class_key(conjugate(mirror_chart(build_P(12))), True, True)


def test_P_feasible_Q_linear_feasible():
    # Q passes the linear stage; its rejection is geometric
    assert evaluate_chart(build_P(12)).survived
    assert evaluate_chart(build_Q(12)).survived
