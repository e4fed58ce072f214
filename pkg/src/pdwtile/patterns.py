"""Partial decorated maps ("patterns") and their embeddings into length-labelled maps.

Slot semantics around a pattern vertex, read cyclically:

* ``e:<id>`` a drawn edge; consecutive drawn edges must be consecutive in
  the host rotation unless a half-edge or gap sits between them;
* ``half`` exactly one host edge sits here, of any label;
* ``gap>=k`` at least ``k`` host edges sit here.

Displayed vertices map injectively.  Edge labels are ``"b"``, ``"ac"``
(anything but b) or ``"any"``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Iterator, Sequence

from .chart import Chart
from .maps import PlanarMap

__all__ = [
    "Pattern",
    "Embedding",
    "forbidden_patterns",
    "window_pattern",
    "match_pattern",
    "brute_force_match",
    "check_embedding",
    "pattern_by_name",
    "find_any",
    "label_ok",
]


def label_ok(want: str, have: str | None) -> bool:
    if want == "any":
        return True
    if want == "b":
        return have == "b"
    if want == "ac":
        return have is not None and have != "b"
    raise ValueError(f"unknown label constraint {want!r}")


def _gap_min(tok: str) -> int | None:
    return int(tok[5:]) if tok.startswith("gap>=") else None


@dataclass(frozen=True)
class Pattern:
    """A partial length-decorated map.

    ``slots[v]`` is the cyclic slot list of vertex ``v``; ``edges[id]`` is
    ``(u, v, label)``.  ``identified`` is an optional small-host variant in
    which some displayed vertices coincide (matched as a separate pattern).
    """

    name: str
    slots: dict
    edges: dict
    identified: "Pattern | None" = None
    note: str = ""

    def __post_init__(self):
        ends: dict[str, list[str]] = {e: [] for e in self.edges}
        for v, toks in self.slots.items():
            for t in toks:
                if t.startswith("e:"):
                    ends[t[2:]].append(v)
                elif t != "half" and _gap_min(t) is None:
                    raise ValueError(f"bad slot {t!r} at {v}")
        for e, (u, v, lab) in self.edges.items():
            if sorted(ends[e]) != sorted([u, v]):
                raise ValueError(f"edge {e} is not listed at both ends")
            label_ok(lab, None)
        if not self._connected():
            raise ValueError("pattern graph must be connected")

    def _connected(self) -> bool:
        vs = list(self.slots)
        seen = {vs[0]}
        stack = [vs[0]]
        while stack:
            x = stack.pop()
            for u, v, _ in self.edges.values():
                for a, b in ((u, v), (v, u)):
                    if a == x and b not in seen:
                        seen.add(b)
                        stack.append(b)
        return len(seen) == len(vs)

    @property
    def vertices(self) -> list[str]:
        return list(self.slots)

    def mirror(self) -> "Pattern":
        """Reverse every cyclic slot list."""
        slots = {v: [toks[0]] + toks[:0:-1] for v, toks in self.slots.items()}
        name = self.name[:-2] if self.name.endswith("^R") else self.name + "^R"
        ident = self.identified.mirror() if self.identified is not None else None
        return Pattern(name, slots, dict(self.edges), ident, self.note)

    def to_json(self) -> dict:
        out = {"name": self.name, "note": self.note, "slots": self.slots, "edges": self.edges}
        if self.identified is not None:
            out["identified"] = self.identified.to_json()
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "Pattern":
        ident = cls.from_json(obj["identified"]) if obj.get("identified") else None
        edges = {k: tuple(v) for k, v in obj["edges"].items()}
        slots = {k: list(v) for k, v in obj["slots"].items()}
        return cls(obj["name"], slots, edges, ident, obj.get("note", ""))

    def __eq__(self, other):
        if not isinstance(other, Pattern):
            return NotImplemented
        return self.to_json() == other.to_json()

    def __hash__(self):
        return hash(json.dumps(self.to_json(), sort_keys=True))


@dataclass(frozen=True)
class Embedding:
    pattern: str
    vertex_map: tuple  # sorted (pattern vertex, host vertex)
    edge_darts: tuple  # sorted (edge id, host dart leaving the first endpoint)

    @property
    def vmap(self) -> dict:
        return dict(self.vertex_map)

    def to_json(self) -> dict:
        return {"pattern": self.pattern, "vertex_map": [list(p) for p in self.vertex_map]}


# ---------------------------------------------------------------------------
# the window patterns


def window_pattern(kind: str, identified: bool = False) -> Pattern:
    """Ten consecutive rim vertices ``v-2 .. v7`` of a wheel-like region plus hubs N, S.

    Even rim vertices see ``(v_{k-1}, v_{k+1}, N)``, odd ones
    ``(v_{k+1}, v_{k-1}, S)``.  ``blade`` has b on N v0, S v1, N v4, S v5;
    ``typhoon`` on N v0, S v1, v3 v4, v5 v6.  The identified variant glues
    ``v6 = v-2`` and ``v7 = v-1`` and empties the hub gaps.
    """
    if kind == "blade":
        bset = {("N", 0), ("S", 1), ("N", 4), ("S", 5)}
    elif kind == "typhoon":
        bset = {("N", 0), ("S", 1), (3, 4), (5, 6)}
    else:
        raise ValueError("kind is 'blade' or 'typhoon'")
    rim = list(range(-2, 6)) if identified else list(range(-2, 8))

    def canon(k):
        if isinstance(k, str) or not identified:
            return k
        return (k + 2) % 8 - 2

    def name(k):
        return k if isinstance(k, str) else f"v{canon(k)}"

    bnames = {frozenset((name(x), name(y))) for x, y in bset}
    edges: dict[str, tuple] = {}
    ids: dict[frozenset, str] = {}

    def edge(x, y):
        key = frozenset((name(x), name(y)))
        if key not in ids:
            eid = f"{name(x)}-{name(y)}"
            ids[key] = eid
            edges[eid] = (name(x), name(y), "b" if key in bnames else "ac")
        return "e:" + ids[key]

    slots: dict[str, list[str]] = {}
    lo, hi = rim[0], rim[-1]
    for k in rim:
        if k % 2 == 0:
            prev = edge(k, k - 1) if (k > lo or identified) else "half"
            nxt = edge(k, k + 1) if (k < hi or identified) else "half"
            slots[name(k)] = [prev, nxt, edge(k, "N")]
        else:
            nxt = edge(k, k + 1) if (k < hi or identified) else "half"
            prev = edge(k, k - 1) if (k > lo or identified) else "half"
            slots[name(k)] = [nxt, prev, edge(k, "S")]
    evens = [k for k in rim if k % 2 == 0]
    odds = [k for k in reversed(rim) if k % 2]
    if identified:
        slots["N"] = [edge("N", k) for k in evens]
        slots["S"] = [edge("S", k) for k in odds]
    else:
        slots["N"] = [edge("N", k) for k in evens] + ["gap>=0"]
        slots["S"] = [edge("S", k) for k in odds] + ["gap>=0"]
    pname = kind + ("@8" if identified else "")
    note = "glued small-host variant, all gaps empty" if identified else ""
    return Pattern(pname, slots, edges, None, note)


def _builtin_patterns() -> list[Pattern]:
    out = []
    for kind in ("blade", "typhoon"):
        base = window_pattern(kind)
        P = Pattern(base.name, base.slots, base.edges, window_pattern(kind, True), base.note)
        out += [P, P.mirror()]
    return out


@lru_cache(maxsize=None)
def _load() -> tuple[Pattern, ...]:
    text = resources.files("pdwtile").joinpath("data/patterns.json").read_text()
    return tuple(Pattern.from_json(o) for o in json.loads(text)["patterns"])


def forbidden_patterns(tile_type: int = 2) -> list[Pattern]:
    """blade, blade^R, typhoon, typhoon^R; each carries its glued 8-face variant."""
    if tile_type not in (2, 4):
        raise ValueError("tile_type is 2 or 4")
    return list(_load())


def write_pattern_data(path) -> None:
    """Regenerate the bundled JSON from :func:`window_pattern`."""
    data = {"schema": "pdwtile.patterns/1", "patterns": [P.to_json() for P in _builtin_patterns()]}
    with open(path, "w") as fh:
        json.dump(data, fh, indent=1)
        fh.write("\n")


# ---------------------------------------------------------------------------
# matching


def _host(host) -> tuple[PlanarMap, Sequence]:
    if isinstance(host, Chart):
        return host.map, host.L
    M, L = host
    return M, L


def _fits(toks: list[str], r: int, rot: list[int]) -> Iterator[list[tuple[int, int]]]:
    """Align slot ``r`` with ``rot[0]``; yield (slot index, dart) pairs for non-gap slots."""
    n = len(toks)
    order = [(r + i) % n for i in range(n)]
    deg = len(rot)

    def rec(i, pos, acc):
        if i == n:
            if pos == deg:
                yield list(acc)
            return
        s = order[i]
        g = _gap_min(toks[s])
        if g is None:
            if pos < deg:
                acc.append((s, rot[pos]))
                yield from rec(i + 1, pos + 1, acc)
                acc.pop()
            return
        rest = sum(1 for j in order[i + 1 :] if _gap_min(toks[j]) is None)
        rest_gap = sum(_gap_min(toks[j]) or 0 for j in order[i + 1 :])
        for k in range(g, deg - pos - rest - rest_gap + 1):
            yield from rec(i + 1, pos + k, acc)

    yield from rec(0, 0, [])


def _rotation_from(M: PlanarMap, d: int) -> list[int]:
    out = [d]
    x = M.sigma[d]
    while x != d:
        out.append(x)
        x = M.sigma[x]
    return out


def _anchor(P: Pattern) -> tuple[str, int]:
    v = max(P.slots, key=lambda x: sum(1 for t in P.slots[x] if t.startswith("e:")))
    r = next(i for i, t in enumerate(P.slots[v]) if _gap_min(t) is None)
    return v, r


def _match(M: PlanarMap, L, P: Pattern, first_only: bool) -> list[Embedding]:
    nverts = len(P.slots)
    if nverts > M.n_vertices:
        return []
    av, ar = _anchor(P)
    need = {v: sum(1 for t in toks if _gap_min(t) is None) + sum(_gap_min(t) or 0 for t in toks) for v, toks in P.slots.items()}
    out: list[Embedding] = []

    def search(vmap, used, edart, pending):
        if not pending:
            if len(vmap) == nverts:
                out.append(Embedding(P.name, tuple(sorted(vmap.items())), tuple(sorted(edart.items()))))
            return
        p, r, d = pending[0]
        rest = pending[1:]
        toks = P.slots[p]
        rot = _rotation_from(M, d)
        for fit in _fits(toks, r, rot):
            vm, us, ed, pend = dict(vmap), set(used), dict(edart), list(rest)
            ok = True
            for s, dart in fit:
                t = toks[s]
                if t == "half":
                    continue
                eid = t[2:]
                u, v, lab = P.edges[eid]
                if not label_ok(lab, L[dart >> 1]):
                    ok = False
                    break
                key = (eid, p)
                other = v if u == p else u
                if (eid, other) in ed:
                    if ed[(eid, other)] != dart ^ 1:
                        ok = False
                        break
                    ed[key] = dart
                    continue
                ed[key] = dart
                tgt = M.tail[dart ^ 1]
                if other in vm:
                    if vm[other] != tgt:
                        ok = False
                        break
                    continue
                if tgt in us or M.degree(tgt) < need[other]:
                    ok = False
                    break
                vm[other] = tgt
                us.add(tgt)
                ro = next(i for i, x in enumerate(P.slots[other]) if x == "e:" + eid)
                pend.append((other, ro, dart ^ 1))
            if ok:
                search(vm, us, ed, pend)
                if first_only and out:
                    return

    for h in range(M.n_vertices):
        if M.degree(h) < need[av]:
            continue
        for d in M.darts_at(h):
            search({av: h}, {h}, {}, [(av, ar, d)])
            if first_only and out:
                return out
    # express edge darts from the first listed endpoint
    fixed = []
    for emb in out:
        ed = dict(emb.edge_darts)
        darts = tuple(sorted((eid, ed[(eid, P.edges[eid][0])]) for eid in P.edges))
        fixed.append(Embedding(emb.pattern, emb.vertex_map, darts))
    return fixed


def match_pattern(host, P: Pattern, first_only: bool = False) -> list[Embedding]:
    """All embeddings of ``P`` (and of its glued variant) into a length-labelled host.

    ``host`` is a :class:`Chart` or a ``(map, labels)`` pair.
    """
    M, L = _host(host)
    out = _match(M, L, P, first_only)
    if P.identified is not None and not (first_only and out):
        out += _match(M, L, P.identified, first_only)
    return out


def find_any(host, patterns: Sequence[Pattern]) -> Embedding | None:
    for P in patterns:
        hit = match_pattern(host, P, first_only=True)
        if hit:
            return hit[0]
    return None


# ---------------------------------------------------------------------------
# independent oracle


def brute_force_match(host, P: Pattern) -> set[tuple]:
    """Vertex maps found by plain adjacency backtracking plus a per-vertex cyclic check."""
    M, L = _host(host)
    found = set()
    for Q in [P] + ([P.identified] if P.identified is not None else []):
        verts = Q.vertices
        adj = {v: set() for v in verts}
        for u, v, _ in Q.edges.values():
            adj[u].add(v)
            adj[v].add(u)
        # BFS order so each vertex after the first has a mapped neighbour
        order = [verts[0]]
        for x in order:
            for y in sorted(adj[x]):
                if y not in order:
                    order.append(y)
        hn = [set(M.neighbours(h)) for h in range(M.n_vertices)]

        def rec(i, vmap):
            if i == len(order):
                for v in verts:
                    h = vmap[v]
                    hl = [(M.tail[d ^ 1], L[d >> 1]) for d in _rotation_from(M, M.darts_at(h)[0])]
                    if not _cyclic_ok_vertex(Q.slots[v], hl, Q, vmap, v):
                        return
                found.add(tuple(sorted(vmap.items())))
                return
            x = order[i]
            cands = range(M.n_vertices) if i == 0 else set.intersection(*[hn[vmap[y]] for y in adj[x] if y in vmap])
            used = set(vmap.values())
            for h in sorted(cands):
                if h in used:
                    continue
                vmap[x] = h
                rec(i + 1, vmap)
                del vmap[x]

        rec(0, {})
    return found


def _cyclic_ok_vertex(toks, hl, Q, vmap, v) -> bool:
    deg = len(hl)
    for start in range(deg):
        seq = hl[start:] + hl[:start]
        if _consume_v(toks, 0, seq, 0, Q, vmap, v):
            return True
    return False


def _consume_v(toks, i, seq, j, Q, vmap, v) -> bool:
    if i == len(toks):
        return j == len(seq)
    t = toks[i]
    g = _gap_min(t)
    if g is not None:
        return any(_consume_v(toks, i + 1, seq, j + k, Q, vmap, v) for k in range(g, len(seq) - j + 1))
    if j >= len(seq):
        return False
    head, lab = seq[j]
    if t != "half":
        a, b, want = Q.edges[t[2:]]
        other = b if a == v else a
        if head != vmap[other] or not label_ok(want, lab):
            return False
    return _consume_v(toks, i + 1, seq, j + 1, Q, vmap, v)


def pattern_by_name(name: str, tile_type: int = 2) -> Pattern:
    """A forbidden pattern or glued variant by name."""
    for P in forbidden_patterns(tile_type):
        for Q in (P, P.identified):
            if Q is not None and Q.name == name:
                return Q
    raise KeyError(name)


def check_embedding(host, P: Pattern, vmap: dict) -> bool:
    """Verify a stored vertex map without searching: injective, and every slot list fits."""
    M, L = _host(host)
    if set(vmap) != set(P.vertices) or len(set(vmap.values())) != len(vmap):
        return False
    if any(not 0 <= h < M.n_vertices for h in vmap.values()):
        return False
    for v in P.vertices:
        h = vmap[v]
        hl = [(M.tail[d ^ 1], L[d >> 1]) for d in _rotation_from(M, M.darts_at(h)[0])]
        if not _cyclic_ok_vertex(P.slots[v], hl, P, vmap, v):
            return False
    return True
