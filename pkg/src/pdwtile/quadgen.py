"""Isomorph-free generation of simple sphere quadrangulations with minimum degree 3.

Two local expansions grow maps from the pseudo-double wheels:

``"split"``
    a vertex ``v`` is split into two vertices along two of its neighbours
    ``w`` and ``y``, creating the new face ``(w, v, y, v')`` (one face more);
``"cube"``
    a new 4-cycle is placed inside a face and joined to its corners
    (four faces more).

Every level is closed under both expansions and deduplicated by
reflection-invariant canonical codes.
"""

from __future__ import annotations

import logging
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Iterator

from .maps import MapError, PlanarMap, canonical_code, from_planar_code, make_pdw, to_planar_code

__all__ = [
    "GenerationNode",
    "KINDS",
    "expansion_sites",
    "expand",
    "reduce",
    "enumerate_quadrangulations",
    "degree_class_count",
    "is_q2",
    "is_q3",
    "verify_planar_code",
]

log = logging.getLogger(__name__)

KINDS = ("split", "cube")


@dataclass(frozen=True)
class GenerationNode:
    map: PlanarMap
    face_count: int
    provenance: tuple = ()


def is_q2(M: PlanarMap) -> bool:
    return M.is_quadrangulation() and M.is_simple() and M.min_degree() >= 3


def is_q3(M: PlanarMap) -> bool:
    return is_q2(M) and M.is_3_connected()


# ---------------------------------------------------------------------------
# expansions on rotation lists


def _split(rot, v, p, q):
    nb = rot[v]
    k = len(nb)
    w, y = nb[p], nb[q]
    A = [nb[(p + t) % k] for t in range(1, (q - p) % k)]
    B = [nb[(q + t) % k] for t in range(1, (p - q) % k)]
    n = len(rot)
    new = [list(r) for r in rot]
    new[v] = [w] + A + [y]
    new.append([y] + B + [w])
    for a in B:
        new[a] = [n if x == v else x for x in new[a]]
    i = new[w].index(v)
    new[w][i : i + 1] = [v, n]
    i = new[y].index(v)
    new[y][i : i + 1] = [n, v]
    return new


def _insert_between(r, a, b, x) -> bool:
    i, j = r.index(a), r.index(b)
    if (i + 1) % len(r) == j:
        r.insert(i + 1, x)
    elif (j + 1) % len(r) == i:
        r.insert(j + 1, x)
    else:
        return False
    return True


def _cube(M: PlanarMap, face: int, orient: int):
    fv = M.face_vertices(face)
    if len(set(fv)) != 4:
        return None
    rot = M.rotation()
    n = len(rot)
    for j in range(4):
        if not _insert_between(rot[fv[j]], fv[j - 1], fv[(j + 1) % 4], n + j):
            return None
    for j in range(4):
        nb = [fv[j], n + (j + 1) % 4, n + (j - 1) % 4]
        rot.append(nb if orient == 1 else nb[::-1])
    return rot


def expansion_sites(M: PlanarMap, kind: str) -> Iterator[tuple]:
    """Candidate sites; ``expand`` may still reject a site that breaks simplicity."""
    if kind == "split":
        for v in range(M.n_vertices):
            k = M.degree(v)
            for p in range(k):
                for q in range(p + 2, k):
                    if (p - q) % k >= 2:
                        yield (v, p, q)
    elif kind == "cube":
        for f in range(len(M.faces())):
            yield (f,)
    else:
        raise ValueError(f"unknown expansion {kind!r}")


def expand(M: PlanarMap, site, kind: str) -> PlanarMap:
    """Apply one expansion; raises :class:`MapError` on an illegal site."""
    if kind == "split":
        v, p, q = site
        k = M.degree(v)
        if not (0 <= p < q < k and q - p >= 2 and (p - q) % k >= 2):
            raise MapError(f"illegal split site {site}")
        N = PlanarMap.from_rotation(_split(M.rotation(), v, p, q))
    elif kind == "cube":
        (f,) = site
        N = None
        for orient in (1, -1):
            rot = _cube(M, f, orient)
            if rot is None:
                break
            try:
                cand = PlanarMap.from_rotation(rot)
            except MapError:
                continue
            if cand.is_quadrangulation():
                N = cand
                break
        if N is None:
            raise MapError(f"illegal cube site {site}")
    else:
        raise ValueError(f"unknown expansion {kind!r}")
    if not N.is_quadrangulation():
        raise MapError(f"{kind} at {site} does not give a quadrangulation")
    return N


def _compact(rot: dict[int, list[int]]) -> list[list[int]]:
    ids = {v: i for i, v in enumerate(sorted(rot))}
    return [[ids[x] for x in rot[v]] for v in sorted(rot)]


def reduce(M: PlanarMap, site, kind: str) -> PlanarMap:
    """Inverse reductions.

    ``split``: ``site = (face, k)`` merges the face's corners ``k`` and
    ``k+2``.  ``cube``: ``site = (face,)`` removes the four degree-3 vertices
    of that face.
    """
    rot = dict(enumerate(M.rotation()))
    if kind == "split":
        f, k = site
        fv = M.face_vertices(f)
        x1, x2 = fv[k % 4], fv[(k + 2) % 4]
        w, y = fv[(k + 1) % 4], fv[(k + 3) % 4]
        if len(set(fv)) != 4:
            raise MapError("face is not a 4-cycle")
        r1, r2 = rot[x1], rot[x2]
        # orient so that the face corner at x1 is (p -> q) with r1 = [q ... p]
        i = next((i for i in range(len(r1)) if {r1[i], r1[(i + 1) % len(r1)]} == {w, y}), None)
        if i is None:
            raise MapError("illegal split reduction site")
        p, q = r1[i], r1[(i + 1) % len(r1)]
        s = r1.index(q)
        a1 = r1[s:] + r1[:s]
        s = r2.index(p)
        a2 = r2[s:] + r2[:s]
        if a2[-1] != q:
            raise MapError("illegal split reduction site")
        rot[x1] = a1 + a2[1:-1]
        for u in a2[1:-1]:
            rot[u] = [x1 if z == x2 else z for z in rot[u]]
        for u in (w, y):
            rot[u] = [z for z in rot[u] if z != x2]
        del rot[x2]
    elif kind == "cube":
        (f,) = site
        inner = M.face_vertices(f)
        if len(set(inner)) != 4 or any(M.degree(u) != 3 for u in inner):
            raise MapError("illegal cube reduction site")
        for u in inner:
            for o in M.neighbours(u):
                if o not in inner:
                    rot[o] = [z for z in rot[o] if z != u]
        for u in inner:
            del rot[u]
    else:
        raise ValueError(f"unknown expansion {kind!r}")
    N = PlanarMap.from_rotation(_compact(rot))
    if not N.is_quadrangulation():
        raise MapError("reduction does not give a quadrangulation")
    return N


def children(M: PlanarMap, max_faces: int) -> Iterator[tuple[bytes, PlanarMap]]:
    """Q2 maps one expansion away from ``M`` with at most ``max_faces`` faces."""
    nf = len(M.faces())
    for kind, grow in (("split", 1), ("cube", 4)):
        if nf + grow > max_faces:
            continue
        for site in expansion_sites(M, kind):
            try:
                N = expand(M, site, kind)
            except MapError:
                continue
            if N.is_simple() and N.min_degree() >= 3:
                yield canonical_code(N, reflections=True), N


def _children_batch(args):
    codes_maps, max_faces = args
    out = []
    for data in codes_maps:
        M = from_planar_code(data)[0]
        out.extend((c, to_planar_code([N], header=False)) for c, N in children(M, max_faces))
    return out


def _levels(F: int, workers: int = 1) -> dict[int, dict[bytes, PlanarMap]]:
    levels: dict[int, dict[bytes, PlanarMap]] = {n: {} for n in range(6, F + 1)}
    for n in range(6, F + 1, 2):
        P = make_pdw(n)
        levels[n][canonical_code(P, reflections=True)] = P
    pool = ProcessPoolExecutor(workers) if workers > 1 else None
    try:
        for n in range(6, F + 1):
            parents = [levels[n][c] for c in sorted(levels[n])]
            if pool is None:
                results = [pair for M in parents for pair in children(M, F)]
            else:
                blobs = [to_planar_code([M], header=False) for M in parents]
                chunks = [(blobs[i::workers], F) for i in range(workers)]
                results = [
                    (c, from_planar_code(b)[0]) for part in pool.map(_children_batch, chunks) for c, b in part
                ]
            for c, N in results:
                levels[len(N.faces())].setdefault(c, N)
            log.info("F=%d: %d maps", n, len(levels[n]))
    finally:
        if pool is not None:
            pool.shutdown()
    return levels


def _check_F(F: int) -> None:
    if F < 6 or F % 2:
        raise ValueError("F must be even and at least 6")


def enumerate_quadrangulations(F: int, cls: str = "Q2", workers: int = 1) -> list[PlanarMap]:
    """One map per class (reflections allowed), ordered by canonical code."""
    _check_F(F)
    if cls not in ("Q2", "Q3"):
        raise ValueError("cls is 'Q2' or 'Q3'")
    level = _levels(F, workers)[F]
    maps = [level[c] for c in sorted(level)]
    if cls == "Q3":
        maps = [M for M in maps if M.is_3_connected()]
    return maps


def degree_class_count(F: int, maps: Iterable[PlanarMap] | None = None, workers: int = 1) -> dict[int, int]:
    """``{Delta: count}`` by number of distinct vertex degrees."""
    if maps is None:
        maps = enumerate_quadrangulations(F, "Q2", workers)
    c = Counter(len(set(M.degrees())) for M in maps)
    return {d: c.get(d, 0) for d in range(1, max(c, default=1) + 1)}


def verify_planar_code(data: bytes, cls: str = "Q2") -> dict:
    """Check an external planar-code stream; report counts and duplicates."""
    maps = from_planar_code(data)
    pred = is_q3 if cls == "Q3" else is_q2
    bad = [i for i, M in enumerate(maps) if not pred(M)]
    codes = Counter(canonical_code(M, reflections=True) for M in maps)
    by_faces = Counter(len(M.faces()) for M in maps)
    return {
        "count": len(maps),
        "invalid": bad,
        "duplicates": sum(n - 1 for n in codes.values()),
        "faces": dict(sorted(by_faces.items())),
        "degree_classes": degree_class_count(0, maps) if maps else {},
    }
