import random

import pytest

from pdwtile.maps import PlanarMap, dual, make_pdw, octahedron
from pdwtile.quadgen import enumerate_quadrangulations


def _pool():
    maps = [octahedron(), dual(octahedron())]
    for F in (6, 8, 10, 12):
        maps.extend(enumerate_quadrangulations(F))
    maps.extend(make_pdw(F) for F in (14, 16))
    return maps


MAP_POOL = _pool()


def random_relabel(M: PlanarMap, rng: random.Random) -> PlanarMap:
    """Shuffle vertex ids and edge ids, and flip a random subset of edges."""
    vp = list(range(M.n_vertices))
    rng.shuffle(vp)
    ep = list(range(M.n_edges))
    rng.shuffle(ep)
    dp = [0] * M.n_darts
    for e, f in enumerate(ep):
        flip = rng.random() < 0.5
        dp[2 * e] = 2 * f + flip
        dp[2 * e + 1] = 2 * f + (not flip)
    return M.relabel(vp, dp)


@pytest.fixture(scope="session")
def map_pool():
    return MAP_POOL


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
