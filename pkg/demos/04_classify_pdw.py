"""Full pipeline over pdw_F: patterns, exact linear stage, geometric rejection, symmetry.

Run: python3 demos/04_classify_pdw.py [F]
"""

import sys

from pdwtile.pipeline import classify_pdw, derive_chart_pdw, is_isohedral_chart

F = int(sys.argv[1]) if len(sys.argv) > 1 else 12

for convex in (True, False):
    rep = classify_pdw(F, 2, convex)
    s = rep.summary()
    print(f"F={F}, {'convex' if convex else 'concave allowed'}: {s['candidates']} candidates, stages {s['stages']}")
    for name, C in sorted(rep.survivor_classes().values(), key=lambda x: x[0]):
        iso, k = is_isohedral_chart(C)
        print(f"    survivor {name or 'unnamed'}: {'isohedral' if iso else f'{k} tile orbits'}")

if F % 4 == 0:
    d = derive_chart_pdw(F)
    print(f"\nnon-meridian placement: consistent charts {d['outcomes']}, after geometry {d['final']}")
