"""Grow every simple quadrangulation with minimum degree 3 and count degree classes.

Run: python3 demos/01_enumerate_quadrangulations.py [max_faces]
"""

import sys
import time

from pdwtile.maps import is_isomorphic, make_pdw
from pdwtile.quadgen import degree_class_count, enumerate_quadrangulations

max_faces = int(sys.argv[1]) if len(sys.argv) > 1 else 14

print("Maps are grown from the pseudo-double wheels by two local expansions")
print("and deduplicated by canonical codes, mirror images identified.\n")
print(f"{'F':>3} {'maps':>6}  distinct-degree classes")
for F in range(6, max_faces + 1, 2):
    t = time.time()
    maps = enumerate_quadrangulations(F)
    counts = degree_class_count(F, maps)
    row = ", ".join(f"{d}: {n}" for d, n in counts.items() if n)
    print(f"{F:>3} {len(maps):>6}  {row}   ({time.time() - t:.2f}s)")

for F in (6, 8):
    (M,) = enumerate_quadrangulations(F)
    print(f"\nF={F}: the only map is the pseudo-double wheel: {is_isomorphic(M, make_pdw(F), reflections=True)}")
