import itertools

import networkx as nx
import pytest

from pdwtile.maps import MapError, canonical_code, is_isomorphic, make_pdw, to_planar_code
from pdwtile.quadgen import (
    degree_class_count,
    enumerate_quadrangulations,
    expand,
    expansion_sites,
    is_q2,
    is_q3,
    reduce,
    verify_planar_code,
)

# p(F, Delta) for simple quadrangulations with minimum degree 3, up to reflection
TABLE = {
    6: {1: 1},
    8: {1: 0, 2: 1},
    10: {1: 0, 2: 3},
    12: {1: 0, 2: 7, 3: 5},
    14: {1: 0, 2: 11, 3: 43, 4: 10},
}


@pytest.mark.parametrize("F", sorted(TABLE))
def test_degree_class_table(F):
    assert degree_class_count(F) == TABLE[F]


@pytest.mark.parametrize("F", [6, 8])
def test_small_F_only_pdw(F):
    (M,) = enumerate_quadrangulations(F)
    assert is_isomorphic(M, make_pdw(F), reflections=True)


@pytest.mark.parametrize("F", [8, 10, 12])
def test_every_map_is_q2_and_distinct(F):
    maps = enumerate_quadrangulations(F)
    assert all(is_q2(M) and len(M.faces()) == F for M in maps)
    codes = {canonical_code(M, reflections=True) for M in maps}
    assert len(codes) == len(maps)


@pytest.mark.parametrize("F", [10, 12, 14])
def test_q3_dedup_agrees_with_graph_isomorphism(F):
    # 3-connected planar graphs embed uniquely up to reflection
    maps = enumerate_quadrangulations(F, "Q3")
    graphs = [nx.Graph([M.edge_ends(e) for e in range(M.n_edges)]) for M in maps]
    for g, h in itertools.combinations(graphs, 2):
        assert not nx.is_isomorphic(g, h)
    assert all(nx.node_connectivity(g) >= 3 for g in graphs)


def test_q3_subset():
    q2 = {canonical_code(M, reflections=True) for M in enumerate_quadrangulations(12)}
    q3 = enumerate_quadrangulations(12, "Q3")
    assert all(is_q3(M) for M in q3)
    assert {canonical_code(M, reflections=True) for M in q3} <= q2


def test_workers_do_not_change_output():
    a = enumerate_quadrangulations(12, workers=1)
    b = enumerate_quadrangulations(12, workers=2)
    assert [canonical_code(M, True) for M in a] == [canonical_code(M, True) for M in b]


@pytest.mark.parametrize("F", [6, 8, 10])
def test_expand_then_reduce_round_trip(F):
    for M in enumerate_quadrangulations(F):
        code = canonical_code(M, reflections=True)
        for site in itertools.islice(expansion_sites(M, "split"), 12):
            try:
                N = expand(M, site, "split")
            except MapError:
                continue
            assert len(N.faces()) == F + 1
            # the new face contains both halves of the split vertex
            back = set()
            for f in range(len(N.faces())):
                for k in (0, 1):
                    try:
                        back.add(canonical_code(reduce(N, (f, k), "split"), reflections=True))
                    except MapError:
                        pass
            assert code in back
        for (f,) in expansion_sites(M, "cube"):
            N = expand(M, (f,), "cube")
            assert len(N.faces()) == F + 4
            inner = [g for g in range(len(N.faces())) if all(N.degree(u) == 3 for u in N.face_vertices(g))
                     and all(u >= M.n_vertices for u in N.face_vertices(g))]
            assert inner
            assert canonical_code(reduce(N, (inner[0],), "cube"), reflections=True) == code


@pytest.mark.parametrize("F", [5, 7, 4])
def test_rejects_bad_F(F):
    with pytest.raises(ValueError):
        enumerate_quadrangulations(F)


def test_verify_planar_code():
    maps = enumerate_quadrangulations(12)
    rep = verify_planar_code(to_planar_code(maps))
    assert rep["count"] == 12 and rep["duplicates"] == 0 and rep["invalid"] == []
    assert rep["degree_classes"] == TABLE[12]
    rep = verify_planar_code(to_planar_code(maps + maps[:2]))
    assert rep["duplicates"] == 2
