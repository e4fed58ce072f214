"""Match the blade and typhoon patterns against b-edge placements.

Run: python3 demos/03_forbidden_patterns.py
"""

from pdwtile.chart import build_A, build_P
from pdwtile.feasibility import b_placements
from pdwtile.maps import make_pdw
from pdwtile.patterns import brute_force_match, find_any, forbidden_patterns, match_pattern

pats = forbidden_patterns()
print("patterns:", ", ".join(P.name for P in pats))

M = make_pdw(8)
N, S = 8, 9
eb = M.edge_between
left = {eb(N, 0), eb(N, 4), eb(S, 1), eb(S, 5)}
right = {eb(N, 4), eb(S, 5), eb(0, 7), eb(1, 2)}
for name, pl in (("two meridian pairs", left), ("meridian b then two equatorial b", right)):
    L = ["b" if e in pl else "a" for e in range(M.n_edges)]
    for P in pats:
        hits = match_pattern((M, L), P)
        if hits:
            print(f"pdw_8, {name}: {P.name} embeds {len(hits)} way(s), first at {dict(hits[0].vertex_map)}")

print()
for C in [build_P(F) for F in (8, 10, 12)] + [build_A()]:
    print(f"{C.name}: contains a forbidden pattern: {find_any(C, pats) is not None}")

print("\nThe fast matcher and a plain backtracking oracle agree on every placement of pdw_10:")
M = make_pdw(10)
agree = True
for pl in b_placements(M):
    L = ["b" if e in pl else "a" for e in range(M.n_edges)]
    for P in pats:
        agree &= {e.vertex_map for e in match_pattern((M, L), P)} == brute_force_match((M, L), P)
print("   ", agree)
