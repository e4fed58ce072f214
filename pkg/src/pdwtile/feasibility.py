"""b-edge placements, angle assignments and their exact linear systems."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

from .chart import ALPHA, BETA, DELTA, GAMMA, Chart, ChartError, area_sum, face_decoration, vertex_types
from .linsys import Feasibility, LinearSystem, solve
from .maps import PlanarMap, automorphisms

__all__ = [
    "b_placements",
    "angle_assignments",
    "lemma_filters",
    "chart_system",
    "evaluate_chart",
    "Verdict",
    "solve",
]


def b_placements(M: PlanarMap) -> Iterator[frozenset[int]]:
    """Perfect matchings of the dual, as sets of primal edges.

    Backtracks on the lowest unmatched face; loops of the dual (an edge with
    the same face on both sides) can never be matched.
    """
    df = M.dart_face()
    nf = len(M.faces())
    inc: list[list[tuple[int, int]]] = [[] for _ in range(nf)]
    for e in range(M.n_edges):
        a, b = df[2 * e], df[2 * e + 1]
        if a != b:
            inc[a].append((e, b))
            inc[b].append((e, a))
    used = [False] * nf
    chosen: list[int] = []

    def rec(start):
        f = start
        while f < nf and used[f]:
            f += 1
        if f == nf:
            yield frozenset(chosen)
            return
        used[f] = True
        for e, g in inc[f]:
            if not used[g]:
                used[g] = True
                chosen.append(e)
                yield from rec(f + 1)
                chosen.pop()
                used[g] = False
        used[f] = False

    yield from rec(0)


def brute_force_placements(M: PlanarMap) -> set[frozenset[int]]:
    """Oracle: all edge subsets of size F/2 covering every face once."""
    df = M.dart_face()
    nf = len(M.faces())
    out = set()
    for sub in itertools.combinations(range(M.n_edges), nf // 2):
        hit = [0] * nf
        for e in sub:
            hit[df[2 * e]] += 1
            hit[df[2 * e + 1]] += 1
        if all(h == 1 for h in hit):
            out.add(frozenset(sub))
    return out


def placement_stabiliser(M: PlanarMap, placement, auts=None):
    auts = automorphisms(M) if auts is None else auts
    return [a for a in auts if all(a.dart_map[2 * e] >> 1 in placement for e in placement)]


def _face_tables(M: PlanarMap, placement, tile_type):
    """Per face, per chirality: the (vertex, symbol) pairs and edge labels."""
    tables = []
    for f, walk in enumerate(M.faces()):
        bs = [d >> 1 for d in walk if d >> 1 in placement]
        if len(bs) != 1:
            raise ChartError(f"face {f} has {len(bs)} b-edges")
        per = {}
        for chir in (1, -1):
            syms, labels = face_decoration(M, f, bs[0], chir, tile_type)
            per[chir] = (tuple((M.tail[c], s) for c, s in syms.items()), labels)
        tables.append(per)
    return tables


def assignment_vectors(M: PlanarMap, placement, tile_type: int = 2, dedupe: bool = True, auts=None):
    """Yield chirality vectors, one per orbit of the placement's stabiliser.

    For type 4 vectors whose a/c labels clash on an edge are skipped.
    """
    placement = frozenset(placement)
    nf = len(M.faces())
    tables = _face_tables(M, placement, tile_type)
    stab = placement_stabiliser(M, placement, auts) if dedupe else []
    df = M.dart_face()
    face_perms = []
    for a in stab:
        if a.is_identity():
            continue
        perm = [0] * nf
        for f, walk in enumerate(M.faces()):
            perm[df[a.dart_map[walk[0]]]] = f
        face_perms.append(perm)  # new[f] = old[perm[f]]
    for bits in itertools.product((1, -1), repeat=nf):
        if face_perms and any(tuple(bits[p[f]] for f in range(nf)) < bits for p in face_perms):
            continue
        if tile_type == 4:
            L: dict[int, str] = {}
            ok = True
            for f, chir in enumerate(bits):
                for e, lab in tables[f][chir][1].items():
                    if L.setdefault(e, lab) != lab:
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                continue
        yield bits


def angle_assignments(M: PlanarMap, placement, tile_type: int = 2, dedupe: bool = True) -> Iterator[Chart]:
    """Every decoration of ``M`` with b-edges ``placement``, modulo symmetry."""
    for bits in assignment_vectors(M, placement, tile_type, dedupe):
        yield Chart.from_placement(M, placement, bits, tile_type)


def vertex_type_set(M: PlanarMap, placement, bits, tile_type=2, _tables=None) -> frozenset:
    tables = _tables or _face_tables(M, frozenset(placement), tile_type)
    counts = [[0, 0, 0, 0] for _ in range(M.n_vertices)]
    for f, chir in enumerate(bits):
        for v, s in tables[f][chir][0]:
            counts[v][s] += 1
    return frozenset(tuple(c) for c in counts)


# ---------------------------------------------------------------------------
# lemma-derived constraints


def _e(i, j):
    v = [0, 0, 0, 0]
    v[i] += 1
    v[j] -= 1
    return tuple(v)


EQ = {
    "alpha=beta": _e(ALPHA, BETA),
    "gamma=delta": _e(GAMMA, DELTA),
    "alpha=delta": _e(ALPHA, DELTA),
    "beta=gamma": _e(BETA, GAMMA),
    "beta=delta": _e(BETA, DELTA),
    "alpha=gamma": _e(ALPHA, GAMMA),
}


def three_valent_witnesses(C: Chart) -> bool:
    """(i) a 3-valent vertex on three a-edges and (ii) a 3-valent vertex on an a- and a b-edge."""
    M = C.map
    w1 = w2 = False
    for v in range(M.n_vertices):
        if M.degree(v) != 3:
            continue
        labs = [C.L[d >> 1] for d in M.darts_at(v)]
        w1 |= labs.count("a") == 3
        w2 |= "a" in labs and "b" in labs
    return w1 and w2


def three_valent_witnesses_from_labels(M: PlanarMap, L) -> bool:
    w1 = w2 = False
    for v in range(M.n_vertices):
        if M.degree(v) != 3:
            continue
        labs = [L[d >> 1] for d in M.darts_at(v)]
        w1 |= labs.count("a") == 3
        w2 |= "a" in labs and "b" in labs
    return w1 and w2


def lemma_filters(C_or_type, fz: Feasibility, witnesses: bool | None = None) -> tuple[bool, str]:
    """Fail a feasible candidate whose solution space forces a forbidden equality.

    ``C_or_type`` is a chart or a bare tile type (then ``witnesses`` says
    whether both witness vertices are present).  Returns ``(passed, reason)``.
    """
    if isinstance(C_or_type, Chart):
        tile_type = C_or_type.tile_type
        if witnesses is None:
            witnesses = tile_type == 2 and three_valent_witnesses(C_or_type)
    else:
        tile_type = C_or_type
        witnesses = bool(witnesses)
    if not fz.feasible:
        return False, fz.reason
    sp = fz.space
    forced = {name: sp.forces(c) for name, c in EQ.items()}
    if tile_type == 2 and (forced["beta=delta"] or forced["alpha=gamma"]):
        return False, "opposite:" + ("beta=delta" if forced["beta=delta"] else "alpha=gamma")
    if tile_type == 4 and forced["alpha=gamma"]:
        return False, "opposite:alpha=gamma"
    if forced["alpha=beta"] and forced["gamma=delta"]:
        return False, "lune:alpha=beta&gamma=delta"
    if tile_type == 4 and forced["alpha=delta"] and forced["beta=gamma"]:
        return False, "lune:alpha=delta&beta=gamma"
    if tile_type == 2 and witnesses and (forced["alpha=delta"] or forced["beta=gamma"]):
        return False, "witnessed:" + ("alpha=delta" if forced["alpha=delta"] else "beta=gamma")
    return True, ""


def lemma_disequalities(tile_type: int, witnesses: bool) -> list:
    """Lemma constraints that a single disequality can express."""
    out = []
    if tile_type == 2:
        out += [(EQ["beta=delta"], 0, "opposite"), (EQ["alpha=gamma"], 0, "opposite")]
        if witnesses:
            out += [(EQ["alpha=delta"], 0, "witnessed"), (EQ["beta=gamma"], 0, "witnessed")]
    else:
        out.append((EQ["alpha=gamma"], 0, "opposite"))
    return out


# ---------------------------------------------------------------------------
# whole-candidate evaluation


@dataclass(frozen=True)
class Verdict:
    """Outcome of the linear stage for one decoration."""

    survived: bool
    reason: str
    feasibility: Feasibility
    trapezoid: bool = False  # beta=gamma and alpha=delta forced (type 2)


def system_from_types(types, F: int) -> LinearSystem:
    eqs = [(t, 2) for t in sorted(types)]
    eqs.append(((1, 1, 1, 1), area_sum(F)))
    return LinearSystem.build(eqs)


@lru_cache(maxsize=200_000)
def _evaluate_types(types: frozenset, F: int, tile_type: int, convex: bool, witnesses: bool) -> Verdict:
    S = system_from_types(types, F)
    fz = solve(S, convex)
    if not fz.feasible:
        return Verdict(False, fz.reason, fz)
    trapezoid = False
    if tile_type == 2 and (fz.space.forces(EQ["beta=gamma"]) or fz.space.forces(EQ["alpha=delta"])):
        # a type-2 tile with beta=gamma is an isosceles trapezoid, so alpha=delta, and conversely
        S = S.with_equations([(EQ["beta=gamma"], 0), (EQ["alpha=delta"], 0)])
        fz = solve(S, convex)
        if not fz.feasible:
            return Verdict(False, "trapezoid:" + fz.reason, fz)
        trapezoid = True
    ok, why = lemma_filters(tile_type, fz, witnesses)
    return Verdict(ok, why, fz, trapezoid)


def evaluate_types(types, F: int, tile_type: int = 2, convex: bool = True, witnesses: bool = False) -> Verdict:
    return _evaluate_types(frozenset(types), F, tile_type, convex, witnesses)


def chart_system(C: Chart) -> LinearSystem:
    from .chart import constraints

    return constraints(C)


def evaluate_chart(C: Chart, convex: bool = True) -> Verdict:
    """Solve a chart's system and apply the lemma filters."""
    F = len(C.map.faces())
    types = frozenset(vt.counts for vt in vertex_types(C))
    w = C.tile_type == 2 and three_valent_witnesses(C)
    return evaluate_types(types, F, C.tile_type, convex, w)


# ---------------------------------------------------------------------------
# pruned search (any map)


@lru_cache(maxsize=500_000)
def _partial_feasible(types: frozenset, F: int, convex: bool) -> bool:
    return solve(system_from_types(types, F), convex).feasible


def _completion_order(M: PlanarMap):
    """Face order that completes vertices early, and the vertices each step completes."""
    nf = len(M.faces())
    fv = [set(M.face_vertices(f)) for f in range(nf)]
    left = [M.degree(v) for v in range(M.n_vertices)]
    order, done_at = [], []
    remaining = set(range(nf))
    f = 0
    while remaining:
        if order:
            f = max(sorted(remaining), key=lambda g: (sum(left[v] == 1 for v in fv[g]), -sum(left[v] for v in fv[g])))
        remaining.discard(f)
        order.append(f)
        for v in fv[f]:
            left[v] -= 1
        done_at.append([v for v in fv[f] if left[v] == 0])
    return order, done_at


def search_assignments(M: PlanarMap, placement, tile_type: int = 2, convex: bool = True, first_only: bool = False):
    """Chirality vectors that pass the linear stage and lemma filters.

    Depth-first over faces; a partial assignment is cut as soon as the
    vertex equations completed so far have no solution (more equations only
    shrink the solution set).  No symmetry reduction.
    """
    placement = frozenset(placement)
    nf = len(M.faces())
    tables = _face_tables(M, placement, tile_type)
    order, done_at = _completion_order(M)
    counts = [[0, 0, 0, 0] for _ in range(M.n_vertices)]
    bits = [0] * nf
    labels: dict[int, str] = {}
    L0 = ["b" if e in placement else "a" for e in range(M.n_edges)]
    witnesses = tile_type == 2 and three_valent_witnesses_from_labels(M, L0)
    out = []

    def rec(i, types):
        if i == nf:
            v = evaluate_types(types, nf, tile_type, convex, witnesses)
            if v.survived:
                out.append(tuple(bits))
                return first_only
            return False
        f = order[i]
        for chir in (1, -1):
            syms, labs = tables[f][chir]
            if tile_type == 4:
                clash = any(labels.get(e, lab) != lab for e, lab in labs.items())
                if clash:
                    continue
                added = [e for e in labs if e not in labels]
                labels.update(labs)
            for v, s in syms:
                counts[v][s] += 1
            new = types | {tuple(counts[v]) for v in done_at[i]}
            ok = _partial_feasible(new, nf, convex) if new != types else True
            stop = False
            if ok:
                bits[f] = chir
                stop = rec(i + 1, new)
            for v, s in syms:
                counts[v][s] -= 1
            if tile_type == 4:
                for e in added:
                    del labels[e]
            if stop:
                return True
        return False

    rec(0, frozenset())
    return out
