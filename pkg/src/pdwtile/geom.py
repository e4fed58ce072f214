"""Spherical quadrangles and tilings on the unit sphere.

Angles cross the interface in units of pi; radians live only inside the
trigonometric kernels.  Quadrangles are stored counter-clockwise seen from
outside the sphere, vertices ``A, B, C, D`` carrying ``alpha .. delta`` with
``AB = BC = a``, ``CD = c`` and ``DA = b``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.optimize import brentq, root

from .chart import Chart, build_Q, constraints
from .linsys import AffineSpace, solve

__all__ = [
    "SphericalQuadrangle",
    "SphericalTiling",
    "solve_tile",
    "closure_defect",
    "closing_points",
    "is_convex",
    "convexity",
    "pole_instance",
    "pole_lemma_check",
    "reject_Q",
    "realize_chart",
    "lune_configuration",
    "lune_disequality_check",
    "tiling_svg",
    "tiling_from_json",
    "coverage_counts",
    "tiling_symmetries",
    "geometric_isohedrality",
    "MARGIN",
]

PI = math.pi
MARGIN = 1e-6  # decisions closer than this to a boundary are "indeterminate"


# ---------------------------------------------------------------------------
# kernels


def _unit(v):
    return v / np.linalg.norm(v)


def tangent(p, q):
    """Unit tangent at ``p`` of the minor arc towards ``q``."""
    t = q - np.dot(p, q) * p
    n = np.linalg.norm(t)
    if n < 1e-15:
        raise ValueError("tangent undefined for coincident or antipodal points")
    return t / n


def travel(p, t, s):
    return math.cos(s) * p + math.sin(s) * t


def turn(p, t, ang):
    """Rotate tangent ``t`` about ``p`` counter-clockwise by ``ang`` radians."""
    return math.cos(ang) * t + math.sin(ang) * np.cross(p, t)


def ccw(p, t1, t2) -> float:
    """Counter-clockwise angle at ``p`` from ``t1`` to ``t2`` in ``[0, 2 pi)``."""
    x = math.atan2(float(np.dot(p, np.cross(t1, t2))), float(np.dot(t1, t2)))
    return x % (2 * PI)


def dist(p, q) -> float:
    return math.atan2(float(np.linalg.norm(np.cross(p, q))), float(np.dot(p, q)))


def _wrap(x: float) -> float:
    return (x + PI) % (2 * PI) - PI


def interior_angles(P) -> list[float]:
    """Interior angles (radians) of a counter-clockwise polygon."""
    n = len(P)
    return [ccw(P[i], tangent(P[i], P[(i + 1) % n]), tangent(P[i], P[i - 1])) for i in range(n)]


def signed_area(P) -> float:
    """Area of a counter-clockwise polygon from a triangle fan (Eriksson's formula)."""
    total = 0.0
    a = P[0]
    for i in range(1, len(P) - 1):
        b, c = P[i], P[i + 1]
        num = float(np.dot(a, np.cross(b, c)))
        den = 1.0 + float(np.dot(a, b) + np.dot(b, c) + np.dot(c, a))
        total += 2.0 * math.atan2(num, den)
    return total


# ---------------------------------------------------------------------------
# single tiles


@dataclass(frozen=True)
class SphericalQuadrangle:
    angles: tuple  # pi units, (alpha, beta, gamma, delta)
    vertices: np.ndarray  # 4 x 3, A B C D counter-clockwise
    lengths: tuple  # radians, (AB, BC, CD, DA)
    tile_type: int = 2

    @property
    def a(self) -> float:
        return self.lengths[0]

    @property
    def b(self) -> float:
        return self.lengths[3]

    @property
    def c(self) -> float:
        return self.lengths[2]

    def recomputed_angles(self) -> list[float]:
        return [x / PI for x in interior_angles(self.vertices)]

    def excess(self) -> float:
        """Area from coordinates, in units of pi."""
        return signed_area(self.vertices) / PI

    def gauss_bonnet_error(self) -> float:
        return abs(self.excess() - (sum(self.recomputed_angles()) - 2))

    def angle_error(self) -> float:
        return max(abs(x - float(y)) for x, y in zip(self.recomputed_angles(), self.angles))

    def mirrored(self) -> "SphericalQuadrangle":
        """Reflection through the xz-plane.  Vertices keep their labels, so the list runs clockwise."""
        R = self.vertices * np.array([1.0, -1.0, 1.0])
        return SphericalQuadrangle(self.angles, R, self.lengths, self.tile_type)

    def to_json(self) -> dict:
        return {
            "angles_pi": [float(x) for x in self.angles],
            "lengths": [float(x) for x in self.lengths],
            "vertices": self.vertices.tolist(),
            "tile_type": self.tile_type,
        }


def _build(angles, a, c):
    """Polygon from BC = a, CD = c, AB = a and the angles at B, C; returns A, B, C, D."""
    _, be, ga, _ = (float(x) * PI for x in angles)
    C = np.array([0.0, 0.0, 1.0])
    B = travel(C, np.array([1.0, 0.0, 0.0]), a)
    tCD = turn(C, tangent(C, B), -ga)
    D = travel(C, tCD, c)
    tBA = turn(B, tangent(B, C), be)
    A = travel(B, tBA, a)
    return A, B, C, D


def _residuals(angles, a, c):
    al, _, _, de = (float(x) * PI for x in angles)
    A, B, C, D = _build(angles, a, c)
    try:
        rD = _wrap(ccw(D, tangent(D, A), tangent(D, C)) - de)
        rA = _wrap(ccw(A, tangent(A, B), tangent(A, D)) - al)
    except ValueError:
        return float("nan"), float("nan")
    return rD, rA


def _residual_d_scan(angles, a):
    """Vectorised angle-D residual of ``_residuals`` along ``c = a``."""
    _, be, ga, de = (float(x) * PI for x in angles)
    n = len(a)
    sa, ca = np.sin(a), np.cos(a)
    Cp = np.array([0.0, 0.0, 1.0])
    B = np.column_stack([sa, np.zeros(n), ca])
    tBC = np.column_stack([-ca, np.zeros(n), sa])
    tBA = math.cos(be) * tBC + math.sin(be) * np.cross(B, tBC)
    A = ca[:, None] * B + sa[:, None] * tBA
    tCD = np.array([math.cos(ga), -math.sin(ga), 0.0])
    D = ca[:, None] * Cp + sa[:, None] * tCD

    def tan(p, q):
        t = q - np.sum(p * q, axis=1)[:, None] * p
        nr = np.linalg.norm(t, axis=1)
        with np.errstate(invalid="ignore", divide="ignore"):
            return t / nr[:, None]

    t1, t2 = tan(D, A), tan(D, np.broadcast_to(Cp, D.shape))
    x = np.arctan2(np.sum(D * np.cross(t1, t2), axis=1), np.sum(t1 * t2, axis=1)) % (2 * PI)
    return (x - de + PI) % (2 * PI) - PI


def _make(angles, a, c, tile_type) -> SphericalQuadrangle:
    A, B, C, D = _build(angles, a, c)
    V = np.array([A, B, C, D])
    lengths = (a, a, c, dist(D, A))
    return SphericalQuadrangle(tuple(angles), V, lengths, tile_type)


def _valid(Q: SphericalQuadrangle, tol: float) -> bool:
    if min(Q.lengths) < 1e-9 or max(Q.lengths) > PI - 1e-9:
        return False
    if min(float(x) for x in Q.angles) < MARGIN:
        return False
    a, _, c, b = Q.lengths
    if abs(a - b) < 1e-7 or (Q.tile_type == 4 and (abs(a - c) < 1e-7 or abs(b - c) < 1e-7)):
        return False  # degenerates to a tile with fewer distinct lengths
    if Q.angle_error() > tol * 10 + 1e-9:
        return False
    # a simple polygon has fan area equal to its angle excess
    return Q.gauss_bonnet_error() < 1e-7


def solve_tile(angles: Sequence, tile_type: int = 2, tol: float = 1e-9) -> list[SphericalQuadrangle]:
    """All quadrangles with the given angles (pi units) and the type's length pattern.

    Type 2 (``c = a``) is over-determined: a root of the angle-D residual in
    ``a`` must also zero the angle-A residual.  Type 4 solves for ``(a, c)``.
    """
    if sum(float(x) for x in angles) <= 2 or any(not 0 < float(x) < 2 for x in angles):
        return []
    out: list[SphericalQuadrangle] = []
    if tile_type == 2:
        grid = np.arange(1e-3, PI, 1e-3)
        vals = _residual_d_scan(angles, grid)
        for i in range(len(grid) - 1):
            y0, y1 = vals[i], vals[i + 1]
            if not (np.isfinite(y0) and np.isfinite(y1)) or y0 * y1 > 0 or abs(y1 - y0) > 1.0:
                continue
            f = lambda x: _residuals(angles, x, x)[0]
            r = brentq(f, grid[i], grid[i + 1], xtol=1e-15, rtol=1e-15, maxiter=200) if y0 * y1 < 0 else grid[i]
            if abs(_residuals(angles, r, r)[1]) < tol:
                Q = _make(angles, r, r, 2)
                if _valid(Q, tol):
                    out.append(Q)
    elif tile_type == 4:
        seen = []
        starts = np.linspace(0.1, PI - 0.1, 10)
        for a0 in starts:
            for c0 in starts:
                sol = root(lambda z: _residuals(angles, z[0], z[1]), [a0, c0], method="hybr", options={"xtol": 1e-14})
                if not sol.success or not np.all(np.isfinite(sol.fun)) or max(abs(sol.fun)) > tol:
                    continue
                a, c = float(sol.x[0]), float(sol.x[1])
                if any(abs(a - s[0]) < 1e-7 and abs(c - s[1]) < 1e-7 for s in seen):
                    continue
                Q = _make(angles, a, c, 4)
                if _valid(Q, tol):
                    seen.append((a, c))
                    out.append(Q)
    else:
        raise ValueError("tile_type is 2 or 4")
    return out


def closure_defect(angles: Sequence, tile_type: int = 2) -> float:
    """Smallest angle mismatch (radians) over a grid of side lengths; 0 when a tile closes."""
    best = float("inf")
    grid = np.linspace(0.02, PI - 0.02, 80)
    for a in grid:
        for c in (grid if tile_type == 4 else (a,)):
            r = _residuals(angles, a, c)
            if np.all(np.isfinite(r)):
                best = min(best, max(abs(r[0]), abs(r[1])))
    return best


def closing_points(
    space: AffineSpace,
    tile_type: int = 2,
    fix: dict | None = None,
    convex: bool = True,
    tol: float = 1e-11,
) -> list[SphericalQuadrangle]:
    """Tiles whose angles lie on ``space`` and close up geometrically.

    All free parameters but the last are pinned (``fix`` maps parameter index
    to value, default the middle of the feasible range found by scanning); the
    last one and the length ``a`` are solved for together.
    """
    if space.dim == 0:
        return solve_tile(space.base, tile_type)
    upper = 1.0 if convex else 2.0
    base = np.array([float(x) for x in space.base])
    basis = [np.array([float(x) for x in v]) for v in space.basis]
    k = space.dim - 1
    user = dict(fix or {})
    centre = _sample_params(space, upper)
    tries = [{**centre, **user}]
    if k >= 1 and 0 not in user:
        lo0, hi0 = _extent(space, 0, upper)
        if lo0 is not None:
            tries += [{**centre, 0: x, **user} for x in np.linspace(lo0, hi0, 11)[1:-1]]
    for fx in tries:
        found = _close_line(base, basis, k, fx, tile_type, upper, tol)
        if found:
            return found
    return []


def _close_line(base, basis, k, fix, tile_type, upper, tol):
    lo, hi = _param_range(base, basis, k, fix, upper)
    if lo is None:
        return []
    p0 = base + sum(fix.get(i, 0.0) * basis[i] for i in range(k))
    v = basis[k]
    if tile_type == 4:
        s = fix.get(k, (lo + hi) / 2)
        return solve_tile(tuple(p0 + s * v), 4)

    def res(z):
        ang = p0 + z[1] * v
        return _residuals(ang, z[0], z[0])

    found: list[SphericalQuadrangle] = []
    for a0 in np.linspace(0.05, PI - 0.05, 24):
        for s0 in np.linspace(lo, hi, 14)[1:-1]:
            sol = root(res, [a0, s0], method="hybr", options={"xtol": 1e-15})
            if not sol.success or not np.all(np.isfinite(sol.fun)) or max(abs(sol.fun)) > tol:
                continue
            a, s = float(sol.x[0]), float(sol.x[1])
            ang = p0 + s * v
            if not np.all((ang > MARGIN) & (ang < upper - MARGIN)):
                continue
            if any(abs(a - Q.a) < 1e-8 and abs(float(Q.angles[0]) - ang[0]) < 1e-8 for Q in found):
                continue
            Q = _make(tuple(float(x) for x in ang), a, a, 2)
            if _valid(Q, 1e-9):
                found.append(Q)
    found.sort(key=lambda Q: (Q.a, tuple(Q.angles)))
    return found


def _lp(space: AffineSpace, upper: float):
    base = np.array([float(x) for x in space.base])
    B = np.array([[float(x) for x in v] for v in space.basis]).T  # 4 x dim
    return np.vstack([-B, B]), np.concatenate([base, upper - base])


def _extent(space: AffineSpace, i: int, upper: float):
    """Range of parameter ``i`` over the open box-feasible set."""
    from scipy.optimize import linprog

    A_ub, b_ub = _lp(space, upper)
    ends = []
    for sgn in (1, -1):
        c = np.zeros(space.dim)
        c[i] = sgn
        r = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=[(None, None)] * space.dim)
        if r.status != 0:
            return None, None
        ends.append(float(r.x[i]))
    return (ends[0], ends[1]) if ends[0] < ends[1] else (None, None)


def _sample_params(space: AffineSpace, upper: float) -> dict:
    """Parameters of an interior point: the centroid of the box-feasible vertices found by LP."""
    from scipy.optimize import linprog

    A_ub, b_ub = _lp(space, upper)
    pts = []
    for i in range(space.dim):
        for sgn in (1, -1):
            c = np.zeros(space.dim)
            c[i] = sgn
            r = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=[(None, None)] * space.dim)
            if r.status == 0:
                pts.append(r.x)
    if not pts:
        return {}
    t = np.mean(pts, axis=0)
    return {i: float(t[i]) for i in range(space.dim)}


def _param_range(base, basis, k, fix, upper):
    """Interval of the last parameter keeping all angles in ``(0, upper)``."""
    p0 = base + sum(fix.get(i, 0.0) * basis[i] for i in range(k))
    v = basis[k]
    lo, hi = -np.inf, np.inf
    for x, d in zip(p0, v):
        if abs(d) < 1e-15:
            if not 0 < x < upper:
                return None, None
            continue
        a, b = (0 - x) / d, (upper - x) / d
        lo, hi = max(lo, min(a, b)), min(hi, max(a, b))
    if not lo < hi:
        return None, None
    return lo, hi


def convexity(Q_or_angles, margin: float = MARGIN) -> str:
    """``"convex"``, ``"concave"`` or ``"indeterminate"`` (an angle within ``margin`` of pi)."""
    ang = Q_or_angles.angles if isinstance(Q_or_angles, SphericalQuadrangle) else Q_or_angles
    ang = [float(x) for x in ang]
    if any(abs(x - 1) <= margin for x in ang):
        if any(x > 1 + margin for x in ang):
            return "concave"
        return "indeterminate"
    return "concave" if any(x > 1 for x in ang) else "convex"


def is_convex(Q_or_angles) -> bool:
    """Strict: every angle < pi (exact for rational inputs)."""
    ang = Q_or_angles.angles if isinstance(Q_or_angles, SphericalQuadrangle) else Q_or_angles
    return all(x < 1 for x in ang)


# ---------------------------------------------------------------------------
# the pole lemma and the alternating-pole chart


def pole_instance(a: float, beta: float) -> SphericalQuadrangle:
    """Quadrangle with B at the north pole, BC = CD = AB = a and |D, south pole| = a.

    ``beta`` (pi units) is the angle at B; the angles at A and D are whatever
    the construction gives.
    """
    B = np.array([0.0, 0.0, 1.0])
    # triangle BCD with BC = CD = a and BD = pi - a
    if not PI / 3 <= a < PI:
        raise ValueError("needs pi/3 <= a < pi for the triangle BCD to exist")
    bd = PI - a
    cosC = (math.cos(bd) - math.cos(a) ** 2) / math.sin(a) ** 2
    gC = math.acos(max(-1.0, min(1.0, cosC)))
    C = travel(B, np.array([1.0, 0.0, 0.0]), a)
    D = travel(C, turn(C, tangent(C, B), -gC), a)
    A = travel(B, turn(B, tangent(B, C), beta * PI), a)
    V = np.array([A, B, C, D])
    ang = tuple(x / PI for x in interior_angles(V))
    return SphericalQuadrangle(ang, V, (a, a, a, dist(D, A)), 2)


def pole_lemma_check(Q: SphericalQuadrangle, tol: float = 1e-9) -> dict:
    """Check the pole lemma on ``Q`` (B at a pole, |D, antipode of B| = BC = CD)."""
    A, B, C, D = Q.vertices
    S = -B
    ok = abs(dist(D, S) - dist(B, C)) < tol and abs(dist(C, D) - dist(B, C)) < tol
    if not ok:
        return {"status": "hypothesis-not-met"}
    bcd = ccw(C, tangent(C, D), tangent(C, B)) / PI
    dbc = ccw(B, tangent(B, C), tangent(B, D)) / PI
    if dbc > 1:
        dbc = 2 - dbc
    if bcd > 1:
        bcd = 2 - bcd
    out = {
        "status": "ok",
        "angle_sum": bcd + dbc,
        "sum_is_line": abs(bcd + dbc - 1) < tol,
        "convex": convexity(Q),
    }
    if out["convex"] == "convex":
        dba = ccw(B, tangent(B, D), tangent(B, A)) / PI
        cba = ccw(B, tangent(B, C), tangent(B, A)) / PI
        out["DBA"], out["CBA"] = dba, cba
        out["DBA_lt_CBA"] = dba < cba
    return out


def _q_space(F: int):
    fz = solve(constraints(build_Q(F)), convex=False)
    if not fz.feasible:
        raise AssertionError("the alternating-pole system should be linearly feasible")
    return fz


def reject_Q(F: int, samples: int = 100, tol: float = 1e-9) -> dict:
    """Run both refutations of the alternating-pole chart over a sweep of its feasible set.

    Each sample is an exact rational point.  The concave refutation: either
    ``a <= pi/2`` puts the rim in two hemispheres so every angle is below pi
    (no concave tile), or ``a > pi/2`` needs ``delta > 1`` at one pole tile
    while the vertex equations force ``delta < 1``.  The convex refutation:
    the pole lemma gives ``angle(v_{F-1} N v_0) = pi - gamma``, convexity puts
    it below ``beta``, so the pole sum ``(F/4)(beta + gamma)`` would exceed 2.
    """
    if F < 8 or F % 4:
        raise ValueError("F must be a multiple of 4, at least 8")
    fz = _q_space(F)
    sp = fz.space
    if sp.dim != 1:
        raise AssertionError(f"expected a one-parameter family, got dimension {sp.dim}")
    lo, hi = _exact_range(sp, Fraction(2))
    records = []
    for k in range(1, samples + 1):
        t = lo + (hi - lo) * Fraction(k, samples + 1)
        x = sp.point([t])
        al, be, ga, de = x
        rec = {"point": [str(v) for v in x]}
        # concave branch
        tiles = solve_tile(x, 2, tol)
        all_below = all(v < 1 for v in x)
        if tiles:
            a = tiles[0].a
            rec["tile"] = {"a": a, "convex": convexity(tiles[0])}
            branch = "a<=pi/2:hemispheres-force-convex" if a <= PI / 2 else "a>pi/2:needs-delta>1"
        else:
            rec["tile"] = None
            branch = "no-tile"
        rec["concave"] = {
            "fired": all_below or not tiles,
            "delta_below_1": de < 1,
            "detail": branch,
        }
        # convex branch
        a_ref = tiles[0].a if tiles else 1.2
        lem = {}
        if PI / 3 <= a_ref < PI:
            lem = pole_lemma_check(pole_instance(a_ref, float(be) if be < 1 else 0.5))
        rec["convex"] = {
            "fired": be + ga <= 1,
            "pole_sum": str(Fraction(F, 4) * (be + ga)),
            "needs": "beta+gamma>1",
            "pole_angle_sum": lem.get("angle_sum"),
        }
        rec["rejected"] = rec["concave"]["fired"] and rec["convex"]["fired"]
        records.append(rec)
    return {
        "F": F,
        "samples": samples,
        "rejected_all": all(r["rejected"] for r in records),
        "concave_fired": sum(r["concave"]["fired"] for r in records),
        "convex_fired": sum(r["convex"]["fired"] for r in records),
        "records": records,
    }


def _exact_range(sp: AffineSpace, upper: Fraction):
    lo, hi = None, None
    for i in range(4):
        c, d = sp.base[i], sp.basis[0][i]
        if d == 0:
            continue
        a, b = (0 - c) / d, (upper - c) / d
        a, b = min(a, b), max(a, b)
        lo = a if lo is None else max(lo, a)
        hi = b if hi is None else min(hi, b)
    return lo, hi


# ---------------------------------------------------------------------------
# the lune lemma


def lune_configuration(t1: float, x: float, y: float) -> dict:
    """Quadrangle PQRS with equal angles ``t1`` (pi units) at P and Q and |PQ| = x.

    S is put at distance ``y`` from P; R is searched on its ray from Q so that
    the angles at R and S agree.  The lune through PS and QR then predicts
    |QR| = |PS|.  Read P, Q as A, B (or D, A) of a tile to get the two cases
    of the lune argument.
    """
    t1r = t1 * PI
    P = np.array([0.0, 0.0, 1.0])
    Q = travel(P, np.array([1.0, 0.0, 0.0]), x)
    tQ = turn(Q, tangent(Q, P), -t1r)
    tP = turn(P, tangent(P, Q), t1r)
    S = travel(P, tP, y)

    def gap(z):
        R = travel(Q, tQ, z)
        try:
            return _wrap(ccw(R, tangent(R, S), tangent(R, Q)) - ccw(S, tangent(S, P), tangent(S, R)))
        except ValueError:
            return float("nan")

    grid = np.linspace(1e-3, PI - 1e-3, 2000)
    vals = [gap(z) for z in grid]
    roots = []
    for i in range(len(grid) - 1):
        y0, y1 = vals[i], vals[i + 1]
        if np.isfinite(y0) and np.isfinite(y1) and y0 * y1 < 0 and abs(y1 - y0) < 1.0:
            z = brentq(gap, grid[i], grid[i + 1], xtol=1e-15)
            R = travel(Q, tQ, z)
            V = np.array([P, Q, R, S])
            if abs(signed_area(V) - (sum(interior_angles(V)) - 2 * PI)) < 1e-9:
                roots.append(z)
    if not roots:
        return {"status": "no-configuration"}
    return {
        "status": "ok",
        "PS": y,
        "QR": roots,
        "equal": all(abs(z - y) < 1e-9 for z in roots),
    }


def lune_disequality_check(Q: SphericalQuadrangle, tol: float = 1e-7) -> dict:
    """A solved tile never has both forbidden equalities: check it numerically."""
    al, be, ga, de = (float(x) for x in Q.recomputed_angles())
    eq41 = abs(al - be) < tol and abs(ga - de) < tol
    eq42 = abs(al - de) < tol and abs(be - ga) < tol
    out = {"alpha=beta&gamma=delta": eq41, "alpha=delta&beta=gamma": eq42}
    a, _, c, b = Q.lengths
    if eq41:
        out["b_equals_a"] = abs(a - b) < 1e-7
    if eq42:
        out["c_equals_a"] = abs(a - c) < 1e-7
    if Q.tile_type == 2:
        out["ok"] = not eq41
    else:
        out["ok"] = not eq41 and not eq42
    return out


# ---------------------------------------------------------------------------
# whole tilings


@dataclass
class SphericalTiling:
    vertices: np.ndarray
    faces: list  # vertex ids per face, in map walk order
    labels: list  # edge labels per face side
    tile: SphericalQuadrangle
    closure_residual: float
    face_residuals: list
    vertex_angle_sums: list  # pi units
    gauss_bonnet_errors: list
    seed_face: int = 0
    first_bad_edge: tuple | None = None
    corner_error: float = 0.0  # radians; placed corner angle versus the prescribed one

    @property
    def ok(self) -> bool:
        """Closed up, corners fill their slots and vertex sums are 2 pi.

        Together with positive tile area this makes the placement a covering
        of degree one, hence a tiling.
        """
        return self.closure_residual < 1e-9 and self.corner_error < 1e-8 and self.max_vertex_error() < 1e-8

    def max_vertex_error(self) -> float:
        return max(abs(s - 2) for s in self.vertex_angle_sums) * PI

    def concave(self) -> bool:
        return any(float(x) > 1 for x in self.tile.angles)

    def to_json(self) -> dict:
        return {
            "schema": "pdwtile.tiling/1",
            "tile": self.tile.to_json(),
            "vertices": [[round(float(c), 15) for c in v] for v in self.vertices],
            "faces": [list(f) for f in self.faces],
            "labels": self.labels,
            "seed_face": self.seed_face,
            "closure_residual": self.closure_residual,
            "max_face_residual": max(self.face_residuals),
            "max_vertex_angle_error": self.max_vertex_error(),
            "max_gauss_bonnet_error": max(self.gauss_bonnet_errors),
            "corner_error": self.corner_error,
            "ok": self.ok,
        }


def coverage_counts(T: SphericalTiling, samples: int = 2000, seed: int = 0, per_edge: int = 48) -> dict:
    """How many tiles cover each of ``samples`` random points (winding numbers).

    A tiling covers almost every point exactly once.  Points within 0.02 rad
    of a tile boundary, or of its antipode, are skipped.  The winding of the
    boundary seen from ``p`` is [p inside] - [-p inside]; tiles of diameter
    below pi never hold an antipodal pair, so +1 means ``p`` is inside.
    """
    rng = np.random.default_rng(seed)
    P = rng.normal(size=(samples, 3))
    P /= np.linalg.norm(P, axis=1)[:, None]
    ref = np.where(np.abs(P[:, :1]) < 0.9, np.array([[1.0, 0.0, 0.0]]), np.array([[0.0, 1.0, 0.0]]))
    U = ref - np.sum(ref * P, axis=1)[:, None] * P
    U /= np.linalg.norm(U, axis=1)[:, None]
    W = np.cross(P, U)
    total = np.zeros(samples, dtype=int)
    skip = np.zeros(samples, dtype=bool)
    cut = math.sin(0.02)
    for f in T.faces:
        poly = T.vertices[list(f)][::-1]
        pts = []
        for i in range(len(poly)):
            a, b = poly[i], poly[(i + 1) % len(poly)]
            th, t = dist(a, b), tangent(a, b)
            pts += [travel(a, t, th * k / per_edge) for k in range(per_edge)]
        B = np.array(pts)
        if np.min(B @ B.T) < math.cos(PI - 0.02):
            raise ValueError("tile too wide for the winding test")
        x, y = B @ U.T, B @ W.T  # boundary x samples
        skip |= np.min(np.hypot(x, y), axis=0) < cut
        ang = np.arctan2(y, x)
        d = np.diff(np.vstack([ang, ang[:1]]), axis=0)
        w = np.rint(np.sum((d + PI) % (2 * PI) - PI, axis=0) / (2 * PI)).astype(int)
        total += w == 1
    k = total[~skip]
    vals, cnt = np.unique(k, return_counts=True)
    return {"checked": int((~skip).sum()), "counts": {int(v): int(c) for v, c in zip(vals, cnt)}}


def tiling_from_json(obj) -> SphericalTiling:
    """Rebuild a tiling for drawing; residual fields are taken as stored."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    if obj.get("schema") != "pdwtile.tiling/1":
        raise ValueError(f"unknown tiling schema {obj.get('schema')!r}")
    t = obj["tile"]
    tile = SphericalQuadrangle(tuple(t["angles_pi"]), np.array(t["vertices"]), tuple(t["lengths"]), t["tile_type"])
    V = np.array(obj["vertices"], dtype=float)
    n = len(obj["faces"])
    return SphericalTiling(
        V, [tuple(f) for f in obj["faces"]], obj["labels"], tile, obj["closure_residual"],
        [obj["max_face_residual"]] * n, [2.0] * len(V), [obj["max_gauss_bonnet_error"]] * n,
        obj["seed_face"], None, obj.get("corner_error", 0.0),
    )


def _frame(p, q):
    n = _unit(np.cross(p, q))
    return np.column_stack([p, n, np.cross(p, n)])


def _kabsch(P, X):
    H = P.T @ X
    U, _, Vt = np.linalg.svd(H)
    d = np.sign(np.linalg.det(Vt.T @ U.T))
    D = np.diag([1.0, 1.0, d])
    return Vt.T @ D @ U.T


def realize_chart(
    C: Chart,
    tile: SphericalQuadrangle | None = None,
    angles: Sequence | None = None,
    fix: dict | None = None,
    seed_face: int = 0,
    convex: bool | None = None,
) -> SphericalTiling:
    """Place a congruent copy of ``tile`` on every face by propagation from ``seed_face``.

    Without ``tile`` the chart's linear system is solved and the first
    closing tile on it is used (``angles`` or ``fix`` narrow the choice).

    Raises:
        ValueError: when no tile closes for the requested parameters.
    """
    M = C.map
    if tile is None:
        if angles is not None:
            tiles = solve_tile(angles, C.tile_type)
        else:
            tiles = []
            for cv in ((True, False) if convex is None else (convex,)):
                fz = solve(constraints(C), convex=cv)
                if fz.feasible:
                    tiles = closing_points(fz.space, C.tile_type, fix, convex=cv)
                if tiles:
                    break
            else:
                if not fz.feasible:
                    raise ValueError(f"chart is linearly infeasible: {fz.reason}")
        if not tiles:
            raise ValueError("no tile closes at the requested parameters")
        tile = tiles[0]
    T = _propagate(C, tile, seed_face, mirror=False)
    if _orientation_flipped(T, M):
        T = _propagate(C, tile, seed_face, mirror=True)
    return T


def _proto(C: Chart, f: int, tile: SphericalQuadrangle, mirror: bool):
    """Tile vertex coordinates for the corners of face ``f`` (by angle symbol)."""
    M = C.map
    corners = M.face_corners(f)
    syms = [C.K[c] for c in corners]
    k = syms.index(0)
    chir = 1 if syms[(k + 1) % 4] == 1 else -1
    use = tile if (chir == -1) != mirror else tile.mirrored()
    return [use.vertices[s] for s in syms]


def _propagate(C: Chart, tile: SphericalQuadrangle, seed: int, mirror: bool) -> SphericalTiling:
    M = C.map
    faces = M.faces()
    fverts = [M.face_vertices(f) for f in range(len(faces))]
    df = M.dart_face()
    pos: dict[int, np.ndarray] = {}
    placed: list = [None] * len(faces)
    for v, p in zip(fverts[seed], _proto(C, seed, tile, mirror)):
        pos[v] = p.copy()
    placed[seed] = np.array(_proto(C, seed, tile, mirror))
    resid = 0.0
    first_bad = None
    queue = [seed]
    seen = {seed}
    while queue:
        f = queue.pop(0)
        for d in faces[f]:
            g = df[d ^ 1]
            if g in seen:
                continue
            u, w = M.tail[d], M.tail[d ^ 1]
            P = _proto(C, g, tile, mirror)
            iu, iw = fverts[g].index(u), fverts[g].index(w)
            R = _frame(pos[u], pos[w]) @ _frame(P[iu], P[iw]).T
            img = [R @ p for p in P]
            for v, x in zip(fverts[g], img):
                if v in pos:
                    e = float(np.linalg.norm(pos[v] - x))
                    if e > resid:
                        resid = e
                        if e > 1e-9 and first_bad is None:
                            first_bad = (u, w)
                else:
                    pos[v] = x
            placed[g] = np.array(img)
            seen.add(g)
            queue.append(g)
    V = np.array([pos[v] for v in range(M.n_vertices)])
    face_res, gb = [], []
    for f in range(len(faces)):
        P = np.array(_proto(C, f, tile, mirror))
        X = V[list(fverts[f])]
        R = _kabsch(P, X)
        face_res.append(float(np.max(np.linalg.norm(X - P @ R.T, axis=1))))
        # faces are walked clockwise from outside
        poly = X[::-1]
        gb.append(abs(signed_area(poly) - (sum(interior_angles(poly)) - 2 * PI)))
    fang: dict = {}
    for f in range(len(faces)):
        poly = V[list(fverts[f])][::-1]
        for v, x in zip(fverts[f][::-1], interior_angles(poly)):
            fang[(f, v)] = x
    sums = [0.0] * M.n_vertices
    for (f, v), x in fang.items():
        sums[v] += x / PI
    # angles read off the placed tiles must be the ones the chart prescribes;
    # a tile placed with the wrong orientation reads 2 pi minus its angles
    corner_err = 0.0
    for c in range(M.n_darts):
        want = float(tile.angles[C.K[c]]) * PI
        corner_err = max(corner_err, abs(fang[(M.corner_face(c), M.tail[c])] - want))
    labels = [[C.L[d >> 1] for d in faces[f]] for f in range(len(faces))]
    return SphericalTiling(
        V, fverts, labels, tile, max(resid, max(face_res)), face_res, sums, gb, seed, first_bad, corner_err
    )


def _orientation_flipped(T: SphericalTiling, M) -> bool:
    return T.corner_error > 1e-6


def tiling_symmetries(T: SphericalTiling, tol: float = 1e-8) -> list[np.ndarray]:
    """Orthogonal matrices (rotations and reflections) carrying the tiling onto itself.

    Any such isometry sends face 0 onto some face with its corners in one of
    eight cyclic matchings, and three corners fix the matrix.
    """
    V = T.vertices
    X = V[list(T.faces[0])]
    face_sets = {frozenset(f) for f in T.faces}
    out = []
    for f in T.faces:
        for flip in (False, True):
            ring = list(f)[::-1] if flip else list(f)
            for k in range(len(ring)):
                Y = V[ring[k:] + ring[:k]]
                R = np.linalg.solve(X[:3], Y[:3]).T
                if np.max(np.abs(R @ R.T - np.eye(3))) > tol or np.max(np.abs(X @ R.T - Y)) > tol:
                    continue
                img = V @ R.T
                # vertex permutation by nearest point
                d = np.linalg.norm(img[:, None, :] - V[None, :, :], axis=2)
                perm = np.argmin(d, axis=1)
                if np.max(d[np.arange(len(V)), perm]) > tol or len(set(perm.tolist())) != len(V):
                    continue
                if all(frozenset(int(perm[v]) for v in g) in face_sets for g in T.faces):
                    out.append(R)
    return out


def geometric_isohedrality(T: SphericalTiling, tol: float = 1e-8) -> dict:
    """Face orbits of the tiling's isometry group; independent of any chart."""
    V = T.vertices
    group = tiling_symmetries(T, tol)
    index = {frozenset(f): i for i, f in enumerate(T.faces)}
    parent = list(range(len(T.faces)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for R in group:
        img = V @ R.T
        perm = np.argmin(np.linalg.norm(img[:, None, :] - V[None, :, :], axis=2), axis=1)
        for i, f in enumerate(T.faces):
            parent[find(i)] = find(index[frozenset(int(perm[v]) for v in f)])
    orbits = len({find(i) for i in range(len(T.faces))})
    rotations = sum(np.linalg.det(R) > 0 for R in group)
    return {"isohedral": orbits == 1, "orbit_count": orbits, "group_order": len(group), "rotations": int(rotations)}


# ---------------------------------------------------------------------------
# pictures


def _fmt(x: float) -> str:
    return f"{x:.3f}"


def tiling_svg(T: SphericalTiling, size: int = 480, view=(0.3, -0.4, 0.87)) -> str:
    """Orthographic view; b sides thick, c sides dotted, hidden arcs faint."""
    z = _unit(np.array(view, dtype=float))
    x = _unit(np.cross([0.0, 0.0, 1.0], z)) if abs(z[2]) < 0.999 else np.array([1.0, 0.0, 0.0])
    y = np.cross(z, x)
    r = size * 0.45
    cx = cy = size / 2
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="{_fmt(r)}" fill="none" stroke="#bbb"/>',
    ]
    drawn = set()
    for f, vs in enumerate(T.faces):
        for k in range(4):
            u, w = vs[k], vs[(k + 1) % 4]
            key = (min(u, w), max(u, w))
            if key in drawn:
                continue
            drawn.add(key)
            lab = T.labels[f][k]
            p, q = T.vertices[u], T.vertices[w]
            th = dist(p, q)
            t = tangent(p, q)
            pts = [travel(p, t, th * i / 16) for i in range(17)]
            front = np.mean([np.dot(pt, z) for pt in pts]) >= 0
            path = " ".join(f"{_fmt(cx + r * np.dot(pt, x))},{_fmt(cy - r * np.dot(pt, y))}" for pt in pts)
            width = 3.5 if lab == "b" else 1.2
            dash = ' stroke-dasharray="3,3"' if lab == "c" else ""
            colour = "#000" if front else "#ccc"
            parts.append(f'<polyline class="edge {lab}" points="{path}" fill="none" stroke="{colour}" stroke-width="{width}"{dash}/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def tiling_to_json(T: SphericalTiling) -> str:
    return json.dumps(T.to_json(), indent=1)
