"""Randomised invariant checks shared by the unit suite and the acceptance run.

Each ``check_*`` is a hypothesis test with 1000 derandomised examples so the
acceptance run is reproducible.
"""

import random
from fractions import Fraction

import numpy as np
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from conftest import MAP_POOL, random_relabel
from pdwtile.linsys import LinearSystem, satisfies, solve
from pdwtile.maps import automorphisms, canonical_code, dual, mirror_map, reflections

TRIALS = 1000
SETTINGS = settings(
    max_examples=TRIALS,
    derandomize=True,
    deadline=None,
    suppress_health_check=list(HealthCheck),
    database=None,
)

_maps = st.sampled_from(range(len(MAP_POOL)))
_seeds = st.integers(0, 2**32 - 1)
_GROUPS = {}


def _group(i):
    if i not in _GROUPS:
        M = MAP_POOL[i]
        _GROUPS[i] = automorphisms(M), reflections(M)
    return _GROUPS[i]


def _is_symmetry(M, g, orientation):
    sig = M.sigma if orientation > 0 else tuple(M.sigma_inv())
    return all(g.dart_map[M.sigma[d]] == sig[g.dart_map[d]] for d in range(M.n_darts)) and all(
        g.vertex_map[M.tail[d]] == M.tail[g.dart_map[d]] for d in range(M.n_darts)
    )


@SETTINGS
@given(_maps, st.data())
def check_group_closure(i, data):
    M = MAP_POOL[i]
    auts, refl = _group(i)
    full = {g.dart_map: g for g in auts + refl}
    assert len(full) == len(auts) + len(refl)
    assert any(g.is_identity() for g in auts)
    g = data.draw(st.sampled_from(list(full.values())))
    h = data.draw(st.sampled_from(list(full.values())))
    gh = g.compose(h)
    assert gh.dart_map in full
    assert g.inverse().dart_map in full
    assert g.compose(g.inverse()).is_identity()
    # orientation of a product is the product of orientations
    o = lambda x: 1 if x.dart_map in {a.dart_map for a in auts} else -1
    assert o(gh) == o(g) * o(h)
    assert _is_symmetry(M, g, o(g))


@SETTINGS
@given(_maps, _seeds)
def check_duality_involution(i, seed):
    M = random_relabel(MAP_POOL[i], random.Random(seed))
    D = dual(M)
    assert D.n_vertices == len(M.faces())
    assert len(D.faces()) == M.n_vertices
    assert sorted(D.degrees()) == sorted(len(f) for f in M.faces())
    DD = dual(D)
    assert DD.sigma == M.sigma
    # same vertex partition of the darts
    groups = lambda N: sorted(tuple(sorted(N.darts_at(v))) for v in range(N.n_vertices))
    assert groups(DD) == groups(M)
    assert canonical_code(DD) == canonical_code(M)


@SETTINGS
@given(_maps, _seeds)
def check_canonical_relabel(i, seed):
    rng = random.Random(seed)
    M = MAP_POOL[i]
    N = random_relabel(M, rng)
    assert canonical_code(N) == canonical_code(M)
    assert canonical_code(mirror_map(N), reflections=True) == canonical_code(M, reflections=True)
    chiral = not reflections(M)
    if chiral:
        assert canonical_code(mirror_map(N)) != canonical_code(M)
    else:
        assert canonical_code(mirror_map(N)) == canonical_code(M)


_coef = st.integers(-3, 3)
_rows = st.lists(st.tuples(st.tuples(_coef, _coef, _coef, _coef), st.integers(-2, 4)), min_size=1, max_size=4)


def _lp_strict(eqs, upper):
    """Largest slack t with t <= x_i <= upper - t on the equation set, by LP."""
    A_eq = [list(c) + [0] for c, _ in eqs]
    b_eq = [float(r) for _, r in eqs]
    A_ub, b_ub = [], []
    for i in range(4):
        row = [0.0] * 5
        row[i], row[4] = -1, 1
        A_ub.append(row)
        b_ub.append(0.0)
        row = [0.0] * 5
        row[i], row[4] = 1, 1
        A_ub.append(row)
        b_ub.append(float(upper))
    res = linprog([0, 0, 0, 0, -1], A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq,
                  bounds=[(None, None)] * 4 + [(None, 1)], method="highs")
    if res.status == 2:
        return None
    return -res.fun


@SETTINGS
@given(_rows, st.sampled_from([True, False]))
def check_solver_resubstitution(rows, convex):
    S = LinearSystem.build(equations=rows)
    fz = solve(S, convex=convex)
    slack = _lp_strict(S.equations, 1 if convex else 2)
    if fz.feasible:
        assert satisfies(S, fz.sample, convex=convex)
        for c, r in S.equations:
            assert sum(Fraction(a) * x for a, x in zip(c, fz.sample)) == r
        assert slack is not None and slack > 0
    else:
        assert slack is None or slack < 1e-9
    if fz.space is not None:
        # every basis direction stays inside the homogeneous solution set
        for b in fz.space.basis:
            for c, _ in S.equations:
                assert sum(a * x for a, x in zip(c, b)) == 0
        if fz.space.dim:
            assert np.linalg.matrix_rank(np.array(fz.space.basis, dtype=float)) == fz.space.dim
