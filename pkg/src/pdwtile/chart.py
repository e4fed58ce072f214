"""Length/angle decorations of quadrangulations and the named charts.

Angle symbols are indices ``0..3`` for alpha, beta, gamma, delta.  Around a
tile the symbols run alpha, beta, gamma, delta with edges alpha-beta = a,
beta-gamma = a, gamma-delta = c and delta-alpha = b.  A face has
chirality ``+1`` when its facial walk meets the corners in that order and
``-1`` when it meets them reversed.
"""

from __future__ import annotations

import base64
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .linsys import GREEK, LinearSystem, format_form
from .maps import (
    PlanarMap,
    from_planar_code,
    make_pdw,
    mirror_map,
    to_planar_code,
)

ALPHA, BETA, GAMMA, DELTA = range(4)
CONJUGATE = (DELTA, GAMMA, BETA, ALPHA)
SCHEMA = "pdwtile.chart/1"


class ChartError(ValueError):
    pass


@dataclass(frozen=True)
class TileShape:
    """Cyclic angle order with the edge label following each angle."""

    tile_type: int

    def __post_init__(self):
        if self.tile_type not in (2, 4):
            raise ChartError(f"tile type must be 2 or 4, got {self.tile_type}")

    def edge_after(self, sym: int) -> str:
        """Label of the edge from corner ``sym`` to the next corner in a,b,g,d order."""
        return ("a", "a", "a" if self.tile_type == 2 else "c", "b")[sym]


@dataclass(frozen=True)
class VertexType:
    counts: tuple[int, int, int, int]

    @property
    def degree(self) -> int:
        return sum(self.counts)

    def __str__(self):
        return format_form(self.counts)


def face_decoration(M: PlanarMap, face: int, b_edge: int, chirality: int, tile_type: int):
    """Corner symbols and edge labels for one face.

    Returns ``(corner_syms, edge_labels)`` as dicts keyed by corner dart and
    edge id.
    """
    walk = M.faces()[face]
    corners = M.face_corners(face)
    j = next(i for i, d in enumerate(walk) if d >> 1 == b_edge)
    # walk[j] runs from corner j to corner j+1 along the b-edge
    order = (ALPHA, BETA, GAMMA, DELTA)
    if chirality == 1:
        syms = {corners[(j + 1 + k) % 4]: order[k] for k in range(4)}
    else:
        syms = {corners[(j - k) % 4]: order[k] for k in range(4)}
    shape = TileShape(tile_type)
    labels = {}
    for k in range(4):
        d = walk[k]
        s0 = syms[corners[k]]
        s1 = syms[corners[(k + 1) % 4]]
        first = s0 if (s0 + 1) % 4 == s1 else s1
        labels[d >> 1] = shape.edge_after(first)
    return syms, labels


@dataclass(frozen=True, eq=False)
class Chart:
    """A map with edge labels ``L`` (per edge) and corner symbols ``K`` (per dart).

    ``chirality`` is per face (aligned with ``M.faces()``) and ``None`` for
    charts not built from tile shapes.
    """

    map: PlanarMap
    L: tuple[str, ...]
    K: tuple[int | None, ...]
    tile_type: int = 2
    chirality: tuple[int, ...] | None = None
    name: str = ""

    @classmethod
    def from_placement(
        cls,
        M: PlanarMap,
        b_edges,
        chirality: Sequence[int],
        tile_type: int = 2,
        name: str = "",
    ) -> "Chart":
        """Decorate every face from its b-edge and chirality.

        Raises:
            ChartError: if a face does not carry exactly one b-edge, or for
                type 4 if two faces disagree on an edge label.
        """
        b_edges = set(b_edges)
        L: list[str | None] = [None] * M.n_edges
        K: list[int | None] = [None] * M.n_darts
        for f, walk in enumerate(M.faces()):
            bs = [d >> 1 for d in walk if d >> 1 in b_edges]
            if len(bs) != 1:
                raise ChartError(f"face {f} has {len(bs)} b-edges")
            syms, labels = face_decoration(M, f, bs[0], chirality[f], tile_type)
            for c, s in syms.items():
                K[c] = s
            for e, lab in labels.items():
                if L[e] is not None and L[e] != lab:
                    raise ChartError(f"edge {e} labelled both {L[e]} and {lab}")
                L[e] = lab
        return cls(M, tuple(L), tuple(K), tile_type, tuple(chirality), name)  # type: ignore[arg-type]

    @property
    def b_edges(self) -> frozenset[int]:
        return frozenset(e for e, lab in enumerate(self.L) if lab == "b")

    def vertex_type(self, v: int) -> VertexType:
        return vertex_type(self, v)

    def __eq__(self, other):
        if not isinstance(other, Chart):
            return NotImplemented
        return (self.map, self.L, self.K) == (other.map, other.L, other.K)

    def __hash__(self):
        return hash((self.map, self.L, self.K))

    def __repr__(self):
        label = self.name or "chart"
        return f"<{label}: type {self.tile_type}, F={len(self.map.faces())}>"


# ---------------------------------------------------------------------------
# per-chart operations


def vertex_type(C: Chart, v: int) -> VertexType:
    counts = [0, 0, 0, 0]
    for d in C.map.darts_at(v):
        s = C.K[d]
        if s is None:
            raise ChartError(f"undecorated angle at vertex {v}")
        counts[s] += 1
    return VertexType(tuple(counts))  # type: ignore[arg-type]


def vertex_types(C: Chart) -> list[VertexType]:
    return [vertex_type(C, v) for v in range(C.map.n_vertices)]


def area_sum(F: int) -> Fraction:
    """Angle sum of a tile in a tiling by ``F`` congruent tiles (pi-rad units)."""
    return 2 + Fraction(4, F)


def constraints(C: Chart, F: int | None = None) -> LinearSystem:
    """One equation per distinct vertex type plus the area equation."""
    F = len(C.map.faces()) if F is None else F
    eqs = [(vt.counts, 2) for vt in vertex_types(C)]
    eqs.append(((1, 1, 1, 1), area_sum(F)))
    return LinearSystem.build(eqs)


def conjugate(C: Chart) -> Chart:
    """Swap alpha<->delta and beta<->gamma; lengths untouched."""
    K = tuple(None if s is None else CONJUGATE[s] for s in C.K)
    chir = None if C.chirality is None else tuple(-c for c in C.chirality)
    return Chart(C.map, C.L, K, C.tile_type, chir, f"conj({C.name})" if C.name else "")


def mirror_chart(C: Chart) -> Chart:
    """Mirror image: reversed rotations, same lengths, angle (u,v,w) -> (w,v,u)."""
    R = mirror_map(C.map)
    inv = C.map.sigma_inv()
    K = tuple(C.K[inv[d]] for d in range(C.map.n_darts))
    chir = None
    if C.chirality is not None:
        # face of dart d in R is the reversed face of dart d^1 in M
        dfM = C.map.dart_face()
        chir = tuple(-C.chirality[dfM[walk[0] ^ 1]] for walk in R.faces())
    return Chart(R, C.L, K, C.tile_type, chir, f"mirror({C.name})" if C.name else "")


def face_chirality(C: Chart, f: int) -> int:
    """Recover a face's chirality from its corner symbols."""
    syms = [C.K[c] for c in C.map.face_corners(f)]
    k = syms.index(ALPHA)
    if syms[(k + 1) % 4] == BETA:
        return 1
    if syms[(k - 1) % 4] == BETA:
        return -1
    raise ChartError(f"face {f} does not carry a tile decoration")


def check_tile_shapes(C: Chart) -> None:
    """Raise unless every face matches :class:`TileShape` with one b-edge."""
    M = C.map
    for f, walk in enumerate(M.faces()):
        bs = [d >> 1 for d in walk if C.L[d >> 1] == "b"]
        if len(bs) != 1:
            raise ChartError(f"face {f} has {len(bs)} b-edges")
        syms, labels = face_decoration(M, f, bs[0], face_chirality(C, f), C.tile_type)
        if any(C.K[c] != s for c, s in syms.items()) or any(C.L[e] != lab for e, lab in labels.items()):
            raise ChartError(f"face {f} does not match the tile shape")


def transport(C: Chart, aut) -> Chart:
    """Image ``h(C)`` of a chart under a map automorphism."""
    L = [None] * len(C.L)
    K = [None] * len(C.K)
    for d, t in enumerate(aut.dart_map):
        K[t] = C.K[d]
        L[t >> 1] = C.L[d >> 1]
    chir = None
    if C.chirality is not None:
        df = C.map.dart_face()
        chir = [0] * len(C.chirality)
        for f, walk in enumerate(C.map.faces()):
            chir[df[aut.dart_map[walk[0]]]] = C.chirality[f]
        chir = tuple(chir)
    return Chart(C.map, tuple(L), tuple(K), C.tile_type, chir, C.name)  # type: ignore[arg-type]


# ---------------------------------------------------------------------------
# canonical forms of decorated maps


_LABEL_CODE = {"a": 0, "b": 1, "c": 2, None: 3}


def chart_code(C: Chart) -> tuple:
    """Orientation-preserving isomorphism invariant of a decorated map."""
    M = C.map
    best = None
    for s in range(M.n_darts):
        if C.L[s >> 1] != "b" and "b" in C.L:
            continue
        order = _bfs_order(M.sigma, s)
        pos = {d: i for i, d in enumerate(order)}
        code = tuple(
            (pos[M.sigma[d]], pos[d ^ 1], _LABEL_CODE[C.L[d >> 1]], -1 if C.K[d] is None else C.K[d])
            for d in order
        )
        if best is None or code < best:
            best = code
    return best  # type: ignore[return-value]


def _bfs_order(sigma, start):
    order = [start]
    seen = {start}
    i = 0
    while i < len(order):
        d = order[i]
        for x in (sigma[d], d ^ 1):
            if x not in seen:
                seen.add(x)
                order.append(x)
        i += 1
    return order


def chart_class_key(C: Chart, mirror: bool = True, conj: bool = False) -> tuple:
    """Key identifying a chart up to isomorphism, optionally mirror and conjugation."""
    variants = [C]
    if conj:
        variants.append(conjugate(C))
    if mirror:
        variants += [mirror_chart(X) for X in variants]
    return min(chart_code(X) for X in variants)


def same_chart(C: Chart, D: Chart, mirror: bool = True, conj: bool = False) -> bool:
    return chart_class_key(C, mirror, conj) == chart_class_key(D, mirror, conj)


# ---------------------------------------------------------------------------
# named charts


def non_meridian_b(F: int, shift: int = 0) -> list[int]:
    """Edges ``v_{2i+s} v_{2i+s+1}`` of ``make_pdw(F)``, ``s`` in {0, 1}."""
    M = make_pdw(F)
    return [M.edge_between((2 * i + shift) % F, (2 * i + shift + 1) % F) for i in range(F // 2)]


def alternating_b(F: int) -> list[int]:
    """b-edges ``N v_{6i}``, ``v_{6i+1} S`` and ``v_{6i+3} v_{6i+4}``."""
    if F % 6:
        raise ChartError("the alternating placement needs F divisible by 6")
    M = make_pdw(F)
    N, S = F, F + 1
    out = []
    for i in range(F // 6):
        out.append(M.edge_between(N, 6 * i))
        out.append(M.edge_between(6 * i + 1, S))
        out.append(M.edge_between(6 * i + 3, (6 * i + 4) % F))
    return out


def build_P(F: int, tile_type: int = 2) -> Chart:
    """The isohedral chart: b on ``v_{2i} v_{2i+1}``, both poles of type (F/2)beta."""
    M = make_pdw(F)
    return Chart.from_placement(M, non_meridian_b(F), [1] * F, tile_type, f"P_{F}")


def build_Q(F: int) -> Chart:
    """P_F with the tiles whose pole angle should be gamma conjugated (type 2)."""
    if F < 8 or F % 4:
        raise ChartError("Q_F needs F a multiple of four, F >= 8")
    M = make_pdw(F)
    N, S = F, F + 1
    flip = set()
    for f in range(F):
        vs = M.face_vertices(f)
        eq = sorted(v for v in vs if v < F)
        if N in vs:
            # north face N, v_{2i}, v_{2i+1}, v_{2i+2}: flipped when 2i = 4k
            lo = next(v for v in eq if v % 2 == 0 and (v + 2) % F in eq)
            if lo % 4 == 0:
                flip.add(f)
        elif S in vs:
            # south face S, v_{2i-1}, v_{2i}, v_{2i+1}: flipped when 2i-1 = 4k+1
            lo = next(v for v in eq if v % 2 == 1 and (v + 2) % F in eq)
            if lo % 4 == 1:
                flip.add(f)
    chir = [-1 if f in flip else 1 for f in range(F)]
    return Chart.from_placement(M, non_meridian_b(F), chir, 2, f"Q_{F}")


def build_A(F: int = 12) -> Chart:
    """The non-isohedral concave chart on the alternating placement.

    Tiles whose b-edge is equatorial carry the opposite chirality to the
    tiles with a meridian b-edge.
    """
    M = make_pdw(F)
    b = alternating_b(F)
    bs = set(b)
    chir = []
    for walk in M.faces():
        e = next(d >> 1 for d in walk if d >> 1 in bs)
        u, v = M.edge_ends(e)
        chir.append(-1 if max(u, v) < F else 1)
    return Chart.from_placement(M, b, chir, 2, f"A_{F}" if F != 12 else "A")


def pole_ids(F: int) -> tuple[int, int]:
    return F, F + 1


# ---------------------------------------------------------------------------
# serialisation


def chart_to_json(C: Chart, **meta) -> dict:
    """JSON-ready dict with fixed field order; the map travels as planar code."""
    M = C.map
    return {
        "schema": SCHEMA,
        "name": C.name,
        "F": len(M.faces()),
        "tile_type": C.tile_type,
        "planar_code": base64.b64encode(to_planar_code([M], header=False)).decode(),
        "lengths": sorted([*sorted(M.edge_ends(e)), C.L[e]] for e in range(M.n_edges)),
        "angles": sorted(([*M.corner(d), None if C.K[d] is None else GREEK[C.K[d]]] for d in range(M.n_darts)),
                         key=lambda t: (t[1], t[0], t[2])),
        "meta": dict(sorted(meta.items())),
    }


def chart_from_json(obj: dict | str) -> Chart:
    if isinstance(obj, str):
        obj = json.loads(obj)
    if obj.get("schema") != SCHEMA:
        raise ChartError(f"unknown chart schema {obj.get('schema')!r}")
    (M,) = from_planar_code(base64.b64decode(obj["planar_code"]))
    L: list[str | None] = [None] * M.n_edges
    for u, v, lab in obj["lengths"]:
        L[M.edge_between(u, v)] = lab
    K: list[int | None] = [None] * M.n_darts
    for u, v, w, sym in obj["angles"]:
        d = M.dart_between(v, u)
        if M.head(M.sigma[d]) != w:
            raise ChartError(f"({u},{v},{w}) is not an angle of the map")
        K[d] = None if sym is None else GREEK.index(sym)
    C = Chart(M, tuple(L), tuple(K), obj["tile_type"], None, obj.get("name", ""))  # type: ignore[arg-type]
    try:
        chir = tuple(face_chirality(C, f) for f in range(len(M.faces())))
    except (ChartError, ValueError):
        return C
    return Chart(M, C.L, C.K, C.tile_type, chir, C.name)
