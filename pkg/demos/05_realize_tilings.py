"""Solve tiles numerically, place them on the sphere and check the result.

Writes SVG pictures to the directory given (default: demo_output).
Run: python3 demos/05_realize_tilings.py [outdir]
"""

import sys
from pathlib import Path

from pdwtile.chart import build_A, build_P
from pdwtile.geom import coverage_counts, reject_Q, realize_chart, tiling_svg
from pdwtile.render import chart_svg

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_output")
out.mkdir(exist_ok=True)

for C in (build_P(12), build_A()):
    T = realize_chart(C)
    ang = ", ".join(f"{float(x):.4f}" for x in T.tile.angles)
    print(f"{C.name}: tile angles ({ang}) pi, a = {T.tile.a:.4f}, b = {T.tile.b:.4f}")
    print(f"    closure residual {T.closure_residual:.1e}, vertex-sum error {T.max_vertex_error():.1e}, "
          f"concave {T.concave()}")
    cov = coverage_counts(T, samples=3000)
    print(f"    random points covered exactly once: {cov['counts']} of {cov['checked']} checked")
    (out / f"{C.name}_tiling.svg").write_text(tiling_svg(T))
    (out / f"{C.name}_chart.svg").write_text(chart_svg(C))

for F in (8, 12, 16):
    r = reject_Q(F, samples=100)
    print(f"Q_{F}: all 100 sampled angle vectors refuted: {r['rejected_all']} "
          f"(concave argument {r['concave_fired']}, convex argument {r['convex_fired']})")
print(f"\npictures in {out}/")
