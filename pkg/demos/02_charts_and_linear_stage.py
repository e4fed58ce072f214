"""Decorate the pseudo-double wheel, read off vertex types, solve the angle system exactly.

Run: python3 demos/02_charts_and_linear_stage.py
"""

from pdwtile.chart import build_A, build_P, build_Q, constraints, vertex_types
from pdwtile.feasibility import b_placements, evaluate_chart
from pdwtile.linsys import format_form
from pdwtile.maps import make_pdw

M = make_pdw(12)
print(f"pdw_12 has {M.n_vertices} vertices, {M.n_edges} edges, {len(M.faces())} faces")
print(f"and {sum(1 for _ in b_placements(M))} ways to put one b-edge on every tile (dual perfect matchings).\n")

for C in (build_P(12), build_Q(12), build_A()):
    types = sorted({str(t) for t in vertex_types(C)})
    S = constraints(C)
    v = evaluate_chart(C, convex=False)
    print(f"{C.name}: vertex types {types}")
    for c, r in S.equations:
        print(f"    {format_form(c, r)}")
    if v.survived:
        sample = ", ".join(str(x) for x in v.feasibility.sample)
        print(f"    feasible, e.g. (alpha, beta, gamma, delta) = ({sample}) pi, "
              f"solution space of dimension {v.feasibility.space.dim}\n")
    else:
        print(f"    rejected: {v.reason}\n")

print("Q_12 passes this linear stage; it is removed later by a geometric argument (demo 05).")
