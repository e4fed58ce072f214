"""Classification pipelines over pseudo-double wheels and over all maps.

Stages, in order: b-placements, forbidden patterns, angle assignments with
exact linear feasibility and lemma filters, then geometric rejection.  Every
candidate gets a :class:`Record`; a record holds its inputs so it can be
recomputed and compared (``replay``).
"""

from __future__ import annotations

import base64
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

from .chart import (
    Chart,
    build_A,
    build_P,
    build_Q,
    chart_class_key,
    chart_to_json,
    mirror_chart,
)
from .feasibility import (
    _face_tables,
    assignment_vectors,
    b_placements,
    evaluate_types,
    three_valent_witnesses_from_labels,
    search_assignments,
    vertex_type_set,
)
from .linsys import format_form
from .maps import PlanarMap, automorphisms, from_planar_code, make_pdw, reflections, to_planar_code
from .patterns import check_embedding, forbidden_patterns, match_pattern, pattern_by_name

__all__ = [
    "Record",
    "Report",
    "patterns_apply",
    "pattern_filter_pdw",
    "derive_chart_pdw",
    "decorated_symmetries",
    "face_orbits",
    "is_isohedral_chart",
    "classify_pdw",
    "classify_all_maps",
    "exclusion_record",
    "replay_record",
    "identify",
]

log = logging.getLogger(__name__)

RECORD_SCHEMA = "pdwtile.verdict/1"
EXCLUSION_SCHEMA = "pdwtile.exclusion/1"


def patterns_apply(F: int, convex: bool) -> bool:
    """The forbidden patterns are proven for convex tiles, and for any tile when F <= 8."""
    return convex or F in (6, 8)


def _labels(M: PlanarMap, placement) -> list[str]:
    return ["b" if e in placement else "a" for e in range(M.n_edges)]


def _pairs(M: PlanarMap, placement) -> list[list[int]]:
    return sorted(sorted(M.edge_ends(e)) for e in placement)


def _from_pairs(M: PlanarMap, pairs) -> frozenset[int]:
    return frozenset(M.edge_between(u, v) for u, v in pairs)


def _first_hit(M: PlanarMap, placement, tile_type: int):
    L = _labels(M, placement)
    for P in forbidden_patterns(tile_type):
        hit = match_pattern((M, L), P, first_only=True)
        if hit:
            return hit[0]
    return None


# ---------------------------------------------------------------------------
# pattern stage


def pattern_filter_pdw(F: int, tile_type: int = 2, convex: bool = True):
    """Split the b-placements of pdw_F into survivors and pattern-rejected ones.

    Returns ``(survivors, rejected)``; ``rejected`` pairs a placement with the
    first embedding found.  When the patterns do not apply every placement
    survives.
    """
    M = make_pdw(F)
    survivors, rejected = [], []
    for pl in sorted(b_placements(M), key=sorted):
        hit = _first_hit(M, pl, tile_type) if patterns_apply(F, convex) else None
        if hit is None:
            survivors.append(pl)
        else:
            rejected.append((pl, hit))
    return survivors, rejected


# ---------------------------------------------------------------------------
# symmetry of decorated maps


def _face_of_edges(M: PlanarMap) -> dict:
    return {frozenset(d >> 1 for d in walk): f for f, walk in enumerate(M.faces())}


def decorated_symmetries(C: Chart) -> list[tuple]:
    """Map symmetries preserving lengths and angles, as ``(automorphism, reflected)``.

    A reflection is an isomorphism onto the mirror map; it preserves the
    decoration when it carries ``C`` onto ``mirror_chart(C)``.
    """
    M = C.map
    Rc = mirror_chart(C)
    out = []
    for refl, group in ((False, automorphisms(M)), (True, reflections(M))):
        tgt = Rc if refl else C
        for a in group:
            if all(tgt.K[t] == C.K[d] and tgt.L[t >> 1] == C.L[d >> 1] for d, t in enumerate(a.dart_map)):
                out.append((a, refl))
    return out


def face_orbits(M: PlanarMap, group) -> list[list[int]]:
    """Face orbits of a list of map symmetries (automorphisms or reflections)."""
    idx = _face_of_edges(M)
    faces = M.faces()
    parent = list(range(len(faces)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a in group:
        for f, walk in enumerate(faces):
            g = idx[frozenset(a.dart_map[d] >> 1 for d in walk)]
            parent[find(f)] = find(g)
    orbits: dict[int, list[int]] = {}
    for f in range(len(faces)):
        orbits.setdefault(find(f), []).append(f)
    return sorted(orbits.values())


def is_isohedral_chart(C: Chart) -> tuple[bool, int]:
    """Whether decorated symmetries act transitively on faces, and the orbit count."""
    orbits = face_orbits(C.map, [a for a, _ in decorated_symmetries(C)])
    return len(orbits) == 1, len(orbits)


# ---------------------------------------------------------------------------
# naming


@lru_cache(maxsize=None)
def _references(F: int, tile_type: int) -> tuple:
    refs = [("P_%d" % F, build_P(F, tile_type))]
    if tile_type == 2 and F >= 8 and F % 4 == 0:
        refs.append(("Q_%d" % F, build_Q(F)))
    if tile_type == 2 and F % 6 == 0:
        refs.append(("A" if F == 12 else "A_%d" % F, build_A(F)))
    return tuple((name, chart_class_key(C, mirror=True, conj=True)) for name, C in refs)


def identify(C: Chart) -> str:
    """Name of a reference chart equal to ``C`` up to mirror and conjugation, or ``""``."""
    F = len(C.map.faces())
    key = chart_class_key(C, mirror=True, conj=True)
    for name, k in _references(F, C.tile_type):
        if k == key:
            return name
    return ""


# ---------------------------------------------------------------------------
# records


@dataclass
class Record:
    """One classified candidate.

    ``stage`` is where it stopped: ``pattern``, ``linear``, ``geometric`` or
    ``survivor``.
    """

    F: int
    tile_type: int
    convex: bool
    placement: list  # sorted vertex pairs of b-edges
    chirality: list | None
    stage: str
    reason: str = ""
    name: str = ""
    types: list = field(default_factory=list)
    sample: list | None = None
    witness: dict | None = None
    chart: dict | None = None
    map_code: str | None = None  # base64 planar code; None means pdw_F

    @property
    def survived(self) -> bool:
        return self.stage == "survivor"

    def to_json(self) -> dict:
        d = {"schema": RECORD_SCHEMA}
        for k in ("F", "tile_type", "convex", "map_code", "placement", "chirality", "stage", "reason", "name",
                  "types", "sample", "witness", "chart"):
            d[k] = getattr(self, k)
        return d

    @classmethod
    def from_json(cls, d: dict) -> "Record":
        if d.get("schema") != RECORD_SCHEMA:
            raise ValueError(f"unknown record schema {d.get('schema')!r}")
        return cls(**{k: v for k, v in d.items() if k != "schema"})


@lru_cache(maxsize=None)
def _q_rejected(F: int) -> bool:
    from .geom import reject_Q

    return reject_Q(F)["rejected_all"]


def _collapse(C: Chart) -> Chart:
    """Trapezoid tiles are mirror-symmetric, so every face may take chirality +1."""
    M = C.map
    return Chart.from_placement(M, C.b_edges, [1] * len(M.faces()), C.tile_type)


def _evaluate(M: PlanarMap, F: int, placement, bits, tile_type, convex, tables, map_code=None) -> Record:
    types = vertex_type_set(M, placement, bits, tile_type, tables)
    C = Chart.from_placement(M, placement, bits, tile_type)
    w = tile_type == 2 and three_valent_witnesses_from_labels(M, C.L)
    v = evaluate_types(types, F, tile_type, convex, w)
    rec = Record(
        F, tile_type, convex, _pairs(M, placement), list(bits), "linear",
        types=sorted(format_form(t, 2) for t in types), map_code=map_code,
    )
    if not v.survived:
        rec.reason = v.reason or "infeasible"
        return rec
    rec.sample = [str(x) for x in v.feasibility.sample]
    rep = _collapse(C) if v.trapezoid else C
    name = identify(rep) if map_code is None else ""
    if v.trapezoid:
        rec.reason = "trapezoid-collapse"
    rec.name = name or "unnamed"
    if name.startswith("Q_") and _q_rejected(F):
        rec.stage = "geometric"
        rec.reason = f"geometric:{name}:concave-branch+convex-branch"
        return rec
    rec.stage = "survivor"
    rec.chart = chart_to_json(rep, name=rec.name)
    return rec


def _placement_orbits(M: PlanarMap, placements):
    """Representatives of placements under automorphisms and reflections, with orbit sizes."""
    group = automorphisms(M) + reflections(M)
    seen: dict = {}
    order = []
    for pl in placements:
        key = min(tuple(sorted(a.dart_map[2 * e] >> 1 for e in pl)) for a in group)
        if key not in seen:
            seen[key] = [pl, 0]
            order.append(key)
        seen[key][1] += 1
    return [(seen[k][0], seen[k][1]) for k in order]


def derive_chart_pdw(F: int, tile_type: int = 2, convex: bool = True) -> dict:
    """Charts on the non-meridian placement, before and after geometric rejection.

    Every angle assignment is enumerated and solved exactly, so the outcome
    is the complete list of consistent charts for this placement.
    """
    from .chart import non_meridian_b

    M = make_pdw(F)
    pl = frozenset(non_meridian_b(F))
    tables = _face_tables(M, pl, tile_type)
    outcomes: dict[str, int] = {}
    final: dict[str, int] = {}
    for bits in assignment_vectors(M, pl, tile_type):
        rec = _evaluate(M, F, pl, bits, tile_type, convex, tables)
        if rec.stage in ("survivor", "geometric"):
            outcomes[rec.name] = outcomes.get(rec.name, 0) + 1
        if rec.survived:
            final[rec.name] = final.get(rec.name, 0) + 1
    return {"outcomes": sorted(outcomes), "final": sorted(final), "counts": outcomes}


@dataclass
class Report:
    F: int
    tile_type: int
    convex: bool
    records: list

    @property
    def survivors(self) -> list[Record]:
        return [r for r in self.records if r.survived]

    def survivor_names(self) -> list[str]:
        return sorted({r.name for r in self.survivors})

    def survivor_classes(self) -> dict:
        """Surviving charts up to isomorphism, mirror and conjugation."""
        from .chart import chart_from_json

        out: dict = {}
        for r in self.survivors:
            C = chart_from_json(r.chart)
            out.setdefault(chart_class_key(C, mirror=True, conj=True), (r.name, C))
        return out

    def summary(self) -> dict:
        stages: dict[str, int] = {}
        for r in self.records:
            stages[r.stage] = stages.get(r.stage, 0) + 1
        return {
            "schema": "pdwtile.summary/1",
            "F": self.F,
            "tile_type": self.tile_type,
            "convex": self.convex,
            "candidates": len(self.records),
            "stages": dict(sorted(stages.items())),
            "survivors": self.survivor_names(),
            "survivor_classes": sorted(n for n, _ in self.survivor_classes().values()),
        }


def _classify_placement(args):
    F, tile_type, convex, pairs = args
    M = make_pdw(F)
    pl = _from_pairs(M, pairs)
    return _placement_records(M, F, pl, tile_type, convex)


def _placement_records(M, F, pl, tile_type, convex, map_code=None) -> list[Record]:
    if patterns_apply(F, convex):
        hit = _first_hit(M, pl, tile_type)
        if hit is not None:
            return [Record(F, tile_type, convex, _pairs(M, pl), None, "pattern", f"pattern:{hit.pattern}",
                           witness=hit.to_json(), map_code=map_code)]
    tables = _face_tables(M, pl, tile_type)
    return [_evaluate(M, F, pl, bits, tile_type, convex, tables, map_code)
            for bits in assignment_vectors(M, pl, tile_type)]


def classify_pdw(F: int, tile_type: int = 2, convex: bool = True, workers: int = 1) -> Report:
    """Run every stage over pdw_F; one record per placement orbit or per assignment."""
    if F < 6 or F % 2:
        raise ValueError("F must be even and at least 6")
    if tile_type not in (2, 4):
        raise ValueError("tile_type is 2 or 4")
    M = make_pdw(F)
    reps = _placement_orbits(M, sorted(b_placements(M), key=sorted))
    jobs = [(F, tile_type, convex, _pairs(M, pl)) for pl, _ in reps]
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            parts = list(ex.map(_classify_placement, jobs))
    else:
        parts = [_classify_placement(j) for j in jobs]
    records = [r for part in parts for r in part]
    log.info("F=%d type %d convex=%s: %d records", F, tile_type, convex, len(records))
    return Report(F, tile_type, convex, records)


# ---------------------------------------------------------------------------
# every map


def exclusion_record(M: PlanarMap, index: int, tile_type: int = 2, convex: bool = True) -> dict:
    """Whether ``M`` admits no decoration surviving the patterns and the linear stage.

    Each placement is tagged ``pattern:<name>`` (with the embedding) or
    ``linear:no-feasible-assignment``; the first placement with a surviving
    assignment makes the map free and is stored with that assignment.
    """
    code = base64.b64encode(to_planar_code([M], header=False)).decode()
    placements = sorted(b_placements(M), key=sorted)
    witnesses = []
    free = None
    use_patterns = patterns_apply(len(M.faces()), convex)
    for pl in placements:
        hit = _first_hit(M, pl, tile_type) if use_patterns else None
        if hit is not None:
            witnesses.append({"placement": _pairs(M, pl), "reason": f"pattern:{hit.pattern}", **hit.to_json()})
            continue
        found = search_assignments(M, pl, tile_type, convex, first_only=True)
        if found:
            free = {"placement": _pairs(M, pl), "chirality": list(found[0])}
            break
        witnesses.append({"placement": _pairs(M, pl), "reason": "linear:no-feasible-assignment"})
    excluded = free is None
    by_pattern = excluded and all(w["reason"].startswith("pattern:") for w in witnesses)
    return {
        "schema": EXCLUSION_SCHEMA,
        "index": index,
        "F": len(M.faces()),
        "tile_type": tile_type,
        "convex": convex,
        "map_code": code,
        "placements": len(placements),
        "excluded": excluded,
        "by_pattern": by_pattern,
        "reason": ("no-placement" if not placements else "every-placement") if excluded else "",
        "witnesses": witnesses if excluded else [],
        "free": free,
    }


def _exclusion_batch(args):
    items, tile_type, convex = args
    out = []
    for i, code in items:
        (M,) = from_planar_code(base64.b64decode(code))
        out.append(exclusion_record(M, i, tile_type, convex))
    return out


def classify_all_maps(F: int, convex: bool = True, tile_type: int = 2, workers: int = 1, maps=None) -> dict:
    """Fractions of Q2 maps with F faces that cannot carry a tiling.

    ``pattern_fraction`` counts maps where every placement contains a
    forbidden pattern; ``fraction`` also uses the exact linear stage.
    """
    from .quadgen import enumerate_quadrangulations

    if maps is None:
        maps = enumerate_quadrangulations(F, "Q2", workers)
    items = [(i, base64.b64encode(to_planar_code([M], header=False)).decode()) for i, M in enumerate(maps)]
    if workers > 1:
        chunks = [(items[k::workers], tile_type, convex) for k in range(workers)]
        with ProcessPoolExecutor(workers) as ex:
            recs = [r for part in ex.map(_exclusion_batch, chunks) for r in part]
        recs.sort(key=lambda r: r["index"])
    else:
        recs = _exclusion_batch((items, tile_type, convex))
    n_ex = sum(r["excluded"] for r in recs)
    n_pat = sum(r["by_pattern"] for r in recs)
    return {
        "schema": "pdwtile.exclusion-summary/1",
        "F": F,
        "tile_type": tile_type,
        "convex": convex,
        "maps": len(recs),
        "excluded": n_ex,
        "fraction": n_ex / len(recs) if recs else 0.0,
        "excluded_by_pattern": n_pat,
        "pattern_fraction": n_pat / len(recs) if recs else 0.0,
        "records": recs,
    }


# ---------------------------------------------------------------------------
# replay


def _check_exclusion(rec: dict) -> list[str]:
    """Check an exclusion record's witnesses without the pruned search where possible."""
    from .chart import Chart
    from .feasibility import evaluate_chart

    (M,) = from_planar_code(base64.b64decode(rec["map_code"]))
    problems = []
    placements = {tuple(map(tuple, _pairs(M, pl))) for pl in b_placements(M)}
    if rec["excluded"]:
        if len(rec["witnesses"]) != len(placements):
            problems.append("witness count differs from placement count")
        for w in rec["witnesses"]:
            if tuple(map(tuple, w["placement"])) not in placements:
                problems.append(f"not a placement: {w['placement']}")
                continue
            if w["reason"].startswith("pattern:"):
                L = _labels(M, _from_pairs(M, w["placement"]))
                P = pattern_by_name(w["pattern"], rec["tile_type"])
                if not check_embedding((M, L), P, dict((k, v) for k, v in w["vertex_map"])):
                    problems.append(f"embedding of {w['pattern']} does not hold")
    else:
        pl = _from_pairs(M, rec["free"]["placement"])
        C = Chart.from_placement(M, pl, rec["free"]["chirality"], rec["tile_type"])
        if not evaluate_chart(C, rec["convex"]).survived:
            problems.append("stored free assignment does not survive")
    return problems


def replay_record(rec: dict) -> list[str]:
    """Recompute a stored record from its inputs; return the differences found."""
    schema = rec.get("schema")
    if schema == EXCLUSION_SCHEMA:
        (M,) = from_planar_code(base64.b64decode(rec["map_code"]))
        again = exclusion_record(M, rec["index"], rec["tile_type"], rec["convex"])
        diffs = [k for k in rec if again.get(k) != rec[k]]
        return [f"field {k} differs" for k in diffs] + _check_exclusion(rec)
    if schema == RECORD_SCHEMA:
        r = Record.from_json(rec)
        if r.map_code is None:
            M = make_pdw(r.F)
        else:
            (M,) = from_planar_code(base64.b64decode(r.map_code))
        pl = _from_pairs(M, r.placement)
        if r.stage == "pattern":
            hit = _first_hit(M, pl, r.tile_type)
            again = None if hit is None else Record(
                r.F, r.tile_type, r.convex, _pairs(M, pl), None, "pattern", f"pattern:{hit.pattern}",
                witness=hit.to_json(), map_code=r.map_code)
            problems = []
            if hit is not None:
                P = pattern_by_name(hit.pattern, r.tile_type)
                if not check_embedding((M, _labels(M, pl)), P, dict((k, v) for k, v in r.witness["vertex_map"])):
                    problems.append("stored embedding does not hold")
        else:
            tables = _face_tables(M, pl, r.tile_type)
            again = _evaluate(M, r.F, pl, tuple(r.chirality), r.tile_type, r.convex, tables, r.map_code)
            problems = []
        if again is None:
            return ["pattern no longer matches"] + problems
        new = again.to_json()
        return [f"field {k} differs" for k in rec if new.get(k) != rec[k]] + problems
    if schema in ("pdwtile.summary/1", "pdwtile.exclusion-summary/1", "pdwtile.config/1"):
        return []
    return [f"unknown schema {schema!r}"]
