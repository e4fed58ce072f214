"""Sphere-embedded maps stored as rotation systems over darts.

Dart ``d`` and ``d ^ 1`` are the two ends of edge ``d >> 1``.  ``sigma[d]``
is the next dart around the tail of ``d``; faces are the orbits of
``d -> sigma[d ^ 1]`` and are always derived, never stored.

A corner (angle) is named by its first dart: corner ``c`` at vertex ``v``
is the angle ``(head(c), v, head(sigma[c]))``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

PLANAR_CODE_HEADER = b">>planar_code<<"


class MapError(ValueError):
    """Raised for rotation systems that do not describe a spherical map."""


@dataclass(frozen=True)
class Automorphism:
    """Orientation-preserving map automorphism.

    ``vertex_map[v]`` is the image of vertex ``v`` and ``dart_map[d]`` the
    image of dart ``d``.
    """

    vertex_map: tuple[int, ...]
    dart_map: tuple[int, ...]

    def compose(self, other: "Automorphism") -> "Automorphism":
        """Return ``self`` after ``other``."""
        return Automorphism(
            tuple(self.vertex_map[v] for v in other.vertex_map),
            tuple(self.dart_map[d] for d in other.dart_map),
        )

    def inverse(self) -> "Automorphism":
        vm = [0] * len(self.vertex_map)
        for v, w in enumerate(self.vertex_map):
            vm[w] = v
        dm = [0] * len(self.dart_map)
        for d, e in enumerate(self.dart_map):
            dm[e] = d
        return Automorphism(tuple(vm), tuple(dm))

    def is_identity(self) -> bool:
        return all(d == e for d, e in enumerate(self.dart_map))


@dataclass(frozen=True, eq=False)
class PlanarMap:
    """A connected genus-0 map.

    Attributes:
        tail: vertex at which each dart starts.
        sigma: next dart in the cyclic order around its tail.
        n_vertices: number of vertices (ids ``0..n_vertices-1``).
    """

    tail: tuple[int, ...]
    sigma: tuple[int, ...]
    n_vertices: int
    _rotation: tuple[tuple[int, ...], ...] = field(init=False, repr=False)

    def __post_init__(self):
        nd = len(self.tail)
        if nd % 2 or len(self.sigma) != nd or nd == 0:
            raise MapError("dart arrays must have equal, even, nonzero length")
        first = [-1] * self.n_vertices
        for d, v in enumerate(self.tail):
            if not 0 <= v < self.n_vertices:
                raise MapError(f"dart {d} has invalid tail {v}")
            if first[v] < 0:
                first[v] = d
        if min(first) < 0:
            raise MapError("isolated vertex")
        if sorted(self.sigma) != list(range(nd)):
            raise MapError("sigma is not a permutation")
        rot = []
        seen = 0
        for v in range(self.n_vertices):
            cyc = [first[v]]
            d = self.sigma[first[v]]
            while d != first[v]:
                if self.tail[d] != v:
                    raise MapError(f"sigma leaves vertex {v}")
                cyc.append(d)
                d = self.sigma[d]
            seen += len(cyc)
            rot.append(tuple(cyc))
        if seen != nd:
            raise MapError("a vertex has darts in more than one sigma cycle")
        object.__setattr__(self, "_rotation", tuple(rot))
        if not self._connected():
            raise MapError("map is not connected")
        if self.n_vertices - self.n_edges + len(self.faces()) != 2:
            raise MapError("Euler characteristic is not 2")

    # construction -------------------------------------------------------

    @classmethod
    def from_rotation(cls, neighbours: Sequence[Sequence[int]]) -> "PlanarMap":
        """Build a simple map from cyclic neighbour lists.

        Raises:
            MapError: if adjacency is asymmetric, has loops or multi-edges,
                or the rotation is not spherical.
        """
        n = len(neighbours)
        dart_of: dict[tuple[int, int], int] = {}
        tail: list[int] = []
        for v, nbrs in enumerate(neighbours):
            if len(set(nbrs)) != len(nbrs):
                raise MapError(f"vertex {v} has a repeated neighbour")
            for u in nbrs:
                if u == v:
                    raise MapError(f"loop at {v}")
                if (v, u) in dart_of:
                    continue
                if v not in neighbours[u]:
                    raise MapError(f"asymmetric adjacency {v}-{u}")
                d = len(tail)
                dart_of[(v, u)] = d
                dart_of[(u, v)] = d + 1
                tail.extend((v, u))
        sigma = [0] * len(tail)
        for v, nbrs in enumerate(neighbours):
            k = len(nbrs)
            for i, u in enumerate(nbrs):
                sigma[dart_of[(v, u)]] = dart_of[(v, nbrs[(i + 1) % k])]
        return cls(tuple(tail), tuple(sigma), n)

    # basic accessors ----------------------------------------------------

    @property
    def n_darts(self) -> int:
        return len(self.tail)

    @property
    def n_edges(self) -> int:
        return len(self.tail) // 2

    def head(self, d: int) -> int:
        return self.tail[d ^ 1]

    def darts_at(self, v: int) -> tuple[int, ...]:
        return self._rotation[v]

    def degree(self, v: int) -> int:
        return len(self._rotation[v])

    def degrees(self) -> list[int]:
        return [len(r) for r in self._rotation]

    def neighbours(self, v: int) -> list[int]:
        return [self.tail[d ^ 1] for d in self._rotation[v]]

    def rotation(self) -> list[list[int]]:
        return [self.neighbours(v) for v in range(self.n_vertices)]

    def edge_ends(self, e: int) -> tuple[int, int]:
        return self.tail[2 * e], self.tail[2 * e + 1]

    def dart_between(self, u: int, v: int) -> int:
        """Dart from ``u`` to ``v`` (first one found for multigraphs)."""
        for d in self._rotation[u]:
            if self.tail[d ^ 1] == v:
                return d
        raise KeyError((u, v))

    def edge_between(self, u: int, v: int) -> int:
        return self.dart_between(u, v) >> 1

    def sigma_inv(self) -> list[int]:
        inv = [0] * self.n_darts
        for d, e in enumerate(self.sigma):
            inv[e] = d
        return inv

    def face_next(self, d: int) -> int:
        return self.sigma[d ^ 1]

    def corner(self, c: int) -> tuple[int, int, int]:
        """Angle ``(u, v, w)`` named by corner dart ``c``."""
        return self.tail[c ^ 1], self.tail[c], self.tail[self.sigma[c] ^ 1]

    def corner_face(self, c: int) -> int:
        """Index (into :meth:`faces`) of the face containing corner ``c``."""
        return self.dart_face()[c ^ 1]

    def _connected(self) -> bool:
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for d in self._rotation[v]:
                u = self.tail[d ^ 1]
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        return len(seen) == self.n_vertices

    # faces --------------------------------------------------------------

    def faces(self) -> list[tuple[int, ...]]:
        """Facial walks as dart tuples, ordered by smallest dart."""
        cached = self.__dict__.get("_faces")
        if cached is not None:
            return cached
        seen = [False] * self.n_darts
        out = []
        for d0 in range(self.n_darts):
            if seen[d0]:
                continue
            walk = []
            d = d0
            while not seen[d]:
                seen[d] = True
                walk.append(d)
                d = self.sigma[d ^ 1]
            out.append(tuple(walk))
        self.__dict__["_faces"] = out
        return out

    def face_vertices(self, i: int) -> tuple[int, ...]:
        return tuple(self.tail[d] for d in self.faces()[i])

    def dart_face(self) -> list[int]:
        cached = self.__dict__.get("_dart_face")
        if cached is not None:
            return cached
        df = [0] * self.n_darts
        for i, walk in enumerate(self.faces()):
            for d in walk:
                df[d] = i
        self.__dict__["_dart_face"] = df
        return df

    def face_corners(self, i: int) -> tuple[int, ...]:
        """Corner darts of face ``i``, aligned with :meth:`face_vertices`."""
        return tuple(self.sigma_inv()[d] for d in self.faces()[i])

    # predicates ---------------------------------------------------------

    def is_simple(self) -> bool:
        seen = set()
        for d in range(0, self.n_darts, 2):
            u, v = self.tail[d], self.tail[d + 1]
            if u == v or (min(u, v), max(u, v)) in seen:
                return False
            seen.add((min(u, v), max(u, v)))
        return True

    def is_quadrangulation(self) -> bool:
        return all(len(f) == 4 for f in self.faces())

    def min_degree(self) -> int:
        return min(self.degrees())

    def is_3_connected(self) -> bool:
        """Brute-force check that no pair of vertices separates the graph."""
        n = self.n_vertices
        if n < 4:
            return False
        adj = [set(self.neighbours(v)) for v in range(n)]
        for a in range(n):
            for b in range(a + 1, n):
                rest = [v for v in range(n) if v not in (a, b)]
                seen = {rest[0]}
                stack = [rest[0]]
                while stack:
                    v = stack.pop()
                    for u in adj[v]:
                        if u not in seen and u != a and u != b:
                            seen.add(u)
                            stack.append(u)
                if len(seen) != n - 2:
                    return False
        return True

    # transformations ----------------------------------------------------

    def relabel(self, vertex_perm: Sequence[int], dart_perm: Sequence[int] | None = None) -> "PlanarMap":
        """Rename vertex ``v`` to ``vertex_perm[v]``; darts optionally too.

        ``dart_perm`` must map ``d ^ 1`` to ``dart_perm[d] ^ 1``.
        """
        nd = self.n_darts
        dp = list(range(nd)) if dart_perm is None else list(dart_perm)
        tail = [0] * nd
        sigma = [0] * nd
        for d in range(nd):
            tail[dp[d]] = vertex_perm[self.tail[d]]
            sigma[dp[d]] = dp[self.sigma[d]]
        return PlanarMap(tuple(tail), tuple(sigma), self.n_vertices)

    def __eq__(self, other):
        if not isinstance(other, PlanarMap):
            return NotImplemented
        return (self.tail, self.sigma, self.n_vertices) == (other.tail, other.sigma, other.n_vertices)

    def __hash__(self):
        return hash((self.tail, self.sigma))

    def __repr__(self):
        return f"PlanarMap(V={self.n_vertices}, E={self.n_edges}, F={len(self.faces())})"


# ---------------------------------------------------------------------------
# named maps


def make_pdw(F: int) -> PlanarMap:
    """Pseudo-double wheel with ``F`` faces.

    Equatorial vertices ``0..F-1``; north pole ``F`` is joined to the even
    ones, south pole ``F+1`` to the odd ones.
    """
    if not isinstance(F, int) or F < 6 or F % 2:
        raise ValueError(f"pseudo-double wheel needs even F >= 6, got {F!r}")
    N, S = F, F + 1
    rot: list[list[int]] = []
    for j in range(F):
        if j % 2 == 0:
            rot.append([(j - 1) % F, (j + 1) % F, N])
        else:
            rot.append([(j + 1) % F, (j - 1) % F, S])
    rot.append(list(range(0, F, 2)))
    rot.append([(F - 1 - 2 * k) % F for k in range(F // 2)])
    return PlanarMap.from_rotation(rot)


def pdw_edge_kind(M: PlanarMap, e: int) -> str:
    """``'northern'``, ``'southern'`` or ``'non-meridian'`` for an edge of a pdw."""
    F = M.n_vertices - 2
    u, v = M.edge_ends(e)
    if F in (u, v):
        return "northern"
    if F + 1 in (u, v):
        return "southern"
    return "non-meridian"


def octahedron() -> PlanarMap:
    """Hand-listed octahedron: antipodal pairs (0,5), (1,3), (2,4)."""
    return PlanarMap.from_rotation([
        [1, 2, 3, 4],
        [0, 4, 5, 2],
        [0, 1, 5, 3],
        [0, 2, 5, 4],
        [0, 3, 5, 1],
        [1, 4, 3, 2],
    ])


# ---------------------------------------------------------------------------
# duality and mirror


def faces(M: PlanarMap) -> list[tuple[int, ...]]:
    return M.faces()


def dual(M: PlanarMap) -> PlanarMap:
    """Dual map: vertex ``i`` is face ``i`` of ``M``; dart ``d`` crosses dart ``d``."""
    df = M.dart_face()
    sigma = tuple(M.sigma[d ^ 1] for d in range(M.n_darts))
    return PlanarMap(tuple(df), sigma, len(M.faces()))


def mirror_map(M: PlanarMap) -> PlanarMap:
    """Reverse every vertex rotation."""
    return PlanarMap(M.tail, tuple(M.sigma_inv()), M.n_vertices)


# ---------------------------------------------------------------------------
# canonical form and automorphisms


def _dart_code(tail, sigma, start: int) -> tuple[int, ...]:
    """Relabel darts in BFS order from ``start``; return (sigma, alpha) in new labels."""
    nd = len(tail)
    num = [-1] * nd
    order = [start]
    num[start] = 0
    i = 0
    code = []
    while i < len(order):
        d = order[i]
        for x in (sigma[d], d ^ 1):
            if num[x] < 0:
                num[x] = len(order)
                order.append(x)
            code.append(num[x])
        i += 1
    return tuple(code)


def _start_darts(M: PlanarMap, sigma) -> list[int]:
    deg = M.degrees()
    # cheap isomorphism-invariant ranking of darts prunes the start set
    key = [(deg[M.tail[d]], deg[M.tail[d ^ 1]], deg[M.tail[sigma[d] ^ 1]]) for d in range(M.n_darts)]
    best = max(key)
    return [d for d in range(M.n_darts) if key[d] == best]


def canonical_code(M: PlanarMap, reflections: bool = False) -> bytes:
    """Isomorphism-invariant code of an oriented map.

    With ``reflections=True`` orientation-reversing isomorphisms are also
    factored out, so a map and its mirror share a code.
    """
    variants = [M.sigma]
    if reflections:
        variants.append(tuple(M.sigma_inv()))
    best = None
    for flag, sigma in enumerate(variants):
        for s in _start_darts(M, sigma):
            c = _dart_code(M.tail, sigma, s)
            if best is None or c < best:
                best = c
    nd = M.n_darts
    width = 1 if nd < 256 else 2
    return nd.to_bytes(2, "big") + b"".join(x.to_bytes(width, "big") for x in best)


def _extend(M: PlanarMap, sigma_src, sigma_dst, d0: int, t0: int, N: PlanarMap | None = None):
    """Try to extend ``d0 -> t0`` to a dart bijection M -> N; None on failure."""
    N = M if N is None else N
    nd = M.n_darts
    img = [-1] * nd
    pre = [-1] * nd
    img[d0], pre[t0] = t0, d0
    stack = [d0]
    while stack:
        d = stack.pop()
        t = img[d]
        for x, y in ((sigma_src[d], sigma_dst[t]), (d ^ 1, t ^ 1)):
            if img[x] < 0:
                if pre[y] >= 0:
                    return None
                img[x], pre[y] = y, x
                stack.append(x)
            elif img[x] != y:
                return None
    vm = [-1] * M.n_vertices
    for d in range(nd):
        v, w = M.tail[d], N.tail[img[d]]
        if vm[v] < 0:
            vm[v] = w
        elif vm[v] != w:
            return None
    return Automorphism(tuple(vm), tuple(img))


def automorphisms(M: PlanarMap) -> list[Automorphism]:
    """All orientation-preserving automorphisms (identity first)."""
    out = []
    deg = M.degrees()
    d0 = 0
    for t in range(M.n_darts):
        if deg[M.tail[t]] != deg[M.tail[d0]] or deg[M.tail[t ^ 1]] != deg[M.tail[d0 ^ 1]]:
            continue
        a = _extend(M, M.sigma, M.sigma, d0, t)
        if a is not None:
            out.append(a)
    out.sort(key=lambda a: not a.is_identity())
    return out


def reflections(M: PlanarMap) -> list[Automorphism]:
    """Orientation-reversing automorphisms, as maps from ``M`` onto ``mirror_map(M)``."""
    R = mirror_map(M)
    out = []
    for t in range(M.n_darts):
        a = _extend(M, M.sigma, R.sigma, 0, t, R)
        if a is not None:
            out.append(a)
    return out


def isomorphism(M: PlanarMap, N: PlanarMap) -> Automorphism | None:
    """An orientation-preserving isomorphism ``M -> N`` if one exists."""
    if (M.n_darts, M.n_vertices) != (N.n_darts, N.n_vertices):
        return None
    if sorted(M.degrees()) != sorted(N.degrees()):
        return None
    for t in range(N.n_darts):
        a = _extend(M, M.sigma, N.sigma, 0, t, N)
        if a is not None:
            return a
    return None


def is_isomorphic(M: PlanarMap, N: PlanarMap, reflections: bool = False) -> bool:
    if isomorphism(M, N) is not None:
        return True
    return reflections and isomorphism(M, mirror_map(N)) is not None


# ---------------------------------------------------------------------------
# planar code


def to_planar_code(maps: Iterable[PlanarMap], header: bool = True) -> bytes:
    """Serialise simple maps in planar code (1-based, 0-terminated)."""
    out = bytearray(PLANAR_CODE_HEADER if header else b"")
    for M in maps:
        if not M.is_simple():
            raise MapError("planar code needs a simple map")
        n = M.n_vertices
        if n < 256:
            out.append(n)
            for v in range(n):
                out.extend(u + 1 for u in M.neighbours(v))
                out.append(0)
        else:
            out.append(0)
            out.extend(n.to_bytes(2, "little"))
            for v in range(n):
                for u in M.neighbours(v):
                    out.extend((u + 1).to_bytes(2, "little"))
                out.extend(b"\0\0")
    return bytes(out)


def from_planar_code(data: bytes) -> list[PlanarMap]:
    """Parse a planar-code stream (header optional, little-endian for n >= 256)."""
    pos = len(PLANAR_CODE_HEADER) if data.startswith(PLANAR_CODE_HEADER) else 0
    maps = []
    while pos < len(data):
        n = data[pos]
        pos += 1
        wide = n == 0
        if wide:
            n = int.from_bytes(data[pos:pos + 2], "little")
            pos += 2
        rot = []
        for _ in range(n):
            nbrs = []
            while True:
                if wide:
                    x = int.from_bytes(data[pos:pos + 2], "little")
                    pos += 2
                else:
                    x = data[pos]
                    pos += 1
                if x == 0:
                    break
                nbrs.append(x - 1)
            rot.append(nbrs)
        maps.append(PlanarMap.from_rotation(rot))
    return maps
