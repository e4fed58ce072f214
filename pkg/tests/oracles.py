"""Brute-force oracles written independently of the library's search code."""

import itertools


def perfect_matchings(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for i, other in enumerate(rest):
        for m in perfect_matchings(rest[:i] + rest[i + 1:]):
            yield [(first, other)] + m


def matchings_via_complete_graph(M):
    """Matchings of K_F on the faces that use only pairs of adjacent faces."""
    df = M.dart_face()
    shared = {}
    for e in range(M.n_edges):
        a, b = sorted((df[2 * e], df[2 * e + 1]))
        shared.setdefault((a, b), []).append(e)
    all_m = list(perfect_matchings(list(range(len(M.faces())))))
    out = set()
    for m in all_m:
        choices = [shared.get(tuple(sorted(p)), []) for p in m]
        for pick in itertools.product(*choices):
            out.add(frozenset(pick))
    return len(all_m), out


def brute_face_orbits(C):
    """Decorated symmetries by direct dart propagation; orbits of faces as vertex sets."""
    M = C.map
    inv = M.sigma_inv()
    syms = []
    for t in range(M.n_darts):
        for refl in (False, True):
            step = inv if refl else M.sigma
            phi = {0: t}
            todo = [0]
            ok = True
            while todo and ok:
                d = todo.pop()
                for x, y in ((M.sigma[d], step[phi[d]]), (d ^ 1, phi[d] ^ 1)):
                    if x in phi:
                        ok &= phi[x] == y
                    else:
                        phi[x] = y
                        todo.append(x)
            if not ok or len(set(phi.values())) != M.n_darts:
                continue
            corner = (lambda d: inv[phi[d]]) if refl else (lambda d: phi[d])
            if all(C.K[corner(d)] == C.K[d] and C.L[phi[d] >> 1] == C.L[d >> 1] for d in range(M.n_darts)):
                syms.append({M.tail[d]: M.tail[phi[d]] for d in range(M.n_darts)})
    faces = [frozenset(M.face_vertices(f)) for f in range(len(M.faces()))]
    orbits = set()
    for f in faces:
        orbits.add(frozenset(frozenset(s[v] for v in f) for s in syms))
    return len(syms), len(orbits)
