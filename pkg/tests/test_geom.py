import math
from fractions import Fraction

import numpy as np
import pytest

from pdwtile.chart import build_A, build_P, constraints
from pdwtile.geom import (
    MARGIN,
    closing_points,
    pole_lemma_check,
    convexity,
    coverage_counts,
    geometric_isohedrality,
    is_convex,
    pole_instance,
    lune_configuration,
    lune_disequality_check,
    realize_chart,
    reject_Q,
    solve_tile,
    tiling_from_json,
    tiling_svg,
)
from pdwtile.linsys import solve


def _arc(p, q):
    return math.acos(max(-1.0, min(1.0, float(np.dot(p, q)))))


def _lhuilier(p, q, r):
    """Triangle area from side lengths only."""
    a, b, c = _arc(q, r), _arc(p, r), _arc(p, q)
    s = (a + b + c) / 2
    t = math.tan(s / 2) * math.tan((s - a) / 2) * math.tan((s - b) / 2) * math.tan((s - c) / 2)
    return 4 * math.atan(math.sqrt(max(t, 0.0)))


def _corner_angle(prev, v, nxt):
    """Angle at v from the spherical law of cosines."""
    a, b, c = _arc(v, prev), _arc(v, nxt), _arc(prev, nxt)
    return math.acos((math.cos(c) - math.cos(a) * math.cos(b)) / (math.sin(a) * math.sin(b)))


@pytest.fixture(scope="module")
def p12_tile():
    fz = solve(constraints(build_P(12)))
    (tile, *_) = closing_points(fz.space, 2)
    return tile


def test_P12_tile_lengths_and_angles(p12_tile):
    Q = p12_tile
    A, B, C, D = Q.vertices
    assert abs(_arc(A, B) - _arc(B, C)) < 1e-12 and abs(_arc(C, D) - _arc(A, B)) < 1e-12
    assert abs(_arc(D, A) - Q.b) < 1e-12 and abs(Q.b - Q.a) > 1e-3
    assert abs(float(Q.angles[1]) - 1 / 3) < 1e-12
    # all angles below pi so law-of-cosines corners are the interior angles
    V = Q.vertices
    for i in range(4):
        ang = _corner_angle(V[i - 1], V[i], V[(i + 1) % 4])
        assert abs(ang / math.pi - float(Q.angles[i])) < 1e-9


def test_gauss_bonnet_independent_area(p12_tile):
    A, B, C, D = p12_tile.vertices
    area = _lhuilier(A, B, C) + _lhuilier(A, C, D)
    assert abs(area - (sum(float(x) for x in p12_tile.angles) - 2) * math.pi) < 1e-10
    assert p12_tile.gauss_bonnet_error() < 1e-10


def test_solve_tile_rejects_bad_angle_sums():
    assert solve_tile((0.5, 0.5, 0.5, 0.5)) == []
    assert solve_tile((0.1, 0.5, 0.5, 2.5)) == []


def test_type4_tile():
    tiles = solve_tile((0.9, 1 / 3, 0.6, 0.5), 4)
    assert tiles
    for Q in tiles:
        assert Q.angle_error() < 1e-9
        assert len({round(x, 6) for x in (Q.a, Q.b, Q.c)}) == 3


def test_convexity_classes():
    assert convexity((0.5, 0.5, 0.5, 0.9)) == "convex"
    assert convexity((0.5, 0.5, 0.5, 1.3)) == "concave"
    assert convexity((0.5, 0.5, 0.5, 1 + MARGIN / 2)) == "indeterminate"
    assert is_convex((Fraction(1, 2),) * 4) and not is_convex((Fraction(1),) * 4)


@pytest.mark.parametrize("a,beta", [(1.2, 0.3), (1.5, 0.4), (2.0, 0.6), (1.1, 0.2)])
def test_pole_lemma(a, beta):
    # B at a pole, BC = CD and D at distance BC from the other pole
    Q = pole_instance(a, beta)
    A, B, C, D = Q.vertices
    assert abs(_arc(D, -B) - a) < 1e-12
    res = pole_lemma_check(Q)
    assert res["status"] == "ok" and res["sum_is_line"]


def test_pole_lemma_domain():
    with pytest.raises(ValueError):
        pole_instance(0.9, 0.4)


@pytest.mark.parametrize("t1,x,y", [(0.45, 0.8, 0.7), (0.6, 1.1, 0.5), (0.3, 0.6, 0.4), (0.7, 0.5, 1.5)])
def test_lune_equal_sides(t1, x, y):
    res = lune_configuration(t1, x, y)
    assert res["status"] == "ok" and res["equal"]


def test_lune_past_apex():
    # S beyond the point where the two sides meet: no quadrangle
    assert lune_configuration(0.3, 0.6, 1.2)["status"] == "no-configuration"


def test_lune_check_on_tile(p12_tile):
    assert lune_disequality_check(p12_tile)["ok"]


@pytest.mark.parametrize("F", [8, 12])
def test_reject_Q(F):
    res = reject_Q(F, samples=20)
    assert res["rejected_all"]
    assert res["concave_fired"] == res["convex_fired"] == 20
    for r in res["records"]:
        assert Fraction(r["convex"]["pole_sum"]) <= 2


@pytest.fixture(scope="module")
def p12_tiling():
    return realize_chart(build_P(12))


def test_P12_tiling(p12_tiling):
    T = p12_tiling
    assert T.ok
    assert T.closure_residual < 1e-9
    assert max(T.gauss_bonnet_errors) < 1e-10
    assert T.max_vertex_error() < 1e-8


def test_P12_coverage(p12_tiling):
    cov = coverage_counts(p12_tiling, samples=1500)
    assert set(cov["counts"]) == {1} and cov["checked"] > 1000


def test_A_tiling_is_concave():
    T = realize_chart(build_A())
    assert T.ok and T.concave()
    assert set(coverage_counts(T, samples=1000)["counts"]) == {1}


def test_wrong_tile_does_not_close(p12_tile):
    # the isohedral tile on the alternating chart leaves gaps
    T = realize_chart(build_A(), tile=p12_tile)
    assert not T.ok


@pytest.mark.parametrize("seed", [0, 3, 7])
def test_seed_face_does_not_matter(seed):
    T = realize_chart(build_P(8), seed_face=seed)
    assert T.ok


def test_svg_deterministic(p12_tiling):
    a = tiling_svg(p12_tiling)
    b = tiling_svg(realize_chart(build_P(12)))
    assert a == b and a.startswith("<svg")


def test_tiling_json_round_trip(p12_tiling):
    obj = p12_tiling.to_json()
    T = tiling_from_json(obj)
    assert tiling_svg(T) == tiling_svg(p12_tiling)
    assert obj["ok"] is True


def test_mirrored_tile_same_angles(p12_tile):
    R = p12_tile.mirrored().vertices
    for i in range(4):
        ang = _corner_angle(R[i - 1], R[i], R[(i + 1) % 4]) / math.pi
        assert abs(ang - float(p12_tile.angles[i])) < 1e-9
    # reflection reverses orientation
    assert np.linalg.det(R[:3]) * np.linalg.det(p12_tile.vertices[:3]) < 0


def test_geometric_isohedrality(p12_tiling):
    g = geometric_isohedrality(p12_tiling)
    assert g["isohedral"] and g["orbit_count"] == 1 and g["group_order"] == 12
    gA = geometric_isohedrality(realize_chart(build_A()))
    assert not gA["isohedral"] and gA["orbit_count"] == 3


def test_symmetries_preserve_vertex_set(p12_tiling):
    from pdwtile.geom import tiling_symmetries

    V = p12_tiling.vertices
    for R in tiling_symmetries(p12_tiling):
        assert np.allclose(R @ R.T, np.eye(3), atol=1e-9)
        img = V @ R.T
        assert max(np.min(np.linalg.norm(V - x, axis=1)) for x in img) < 1e-8
