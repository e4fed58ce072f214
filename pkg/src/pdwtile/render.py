"""Deterministic SVG drawings of charts (Tutte layout) and tilings."""

from __future__ import annotations

import numpy as np

from .chart import Chart
from .geom import SphericalTiling, tiling_svg
from .linsys import GREEK

__all__ = ["tutte_layout", "chart_svg", "tiling_svg"]

_SYM = "αβγδ"


def tutte_layout(M, outer: int | None = None) -> np.ndarray:
    """Barycentric embedding with the ``outer`` face (default: largest-degree face) on a circle."""
    faces = M.faces()
    if outer is None:
        deg = M.degrees()
        outer = max(range(len(faces)), key=lambda f: (sum(deg[v] for v in M.face_vertices(f)), -f))
    ring = list(M.face_vertices(outer))[::-1]
    n = M.n_vertices
    pos = np.zeros((n, 2))
    for k, v in enumerate(ring):
        t = 2 * np.pi * k / len(ring) + np.pi / 4
        pos[v] = (np.cos(t), np.sin(t))
    inner = [v for v in range(n) if v not in ring]
    if inner:
        idx = {v: i for i, v in enumerate(inner)}
        A = np.zeros((len(inner), len(inner)))
        b = np.zeros((len(inner), 2))
        for v in inner:
            i = idx[v]
            for w in M.neighbours(v):
                A[i, i] += 1
                if w in idx:
                    A[i, idx[w]] -= 1
                else:
                    b[i] += pos[w]
        sol = np.linalg.solve(A, b)
        for v in inner:
            pos[v] = sol[idx[v]]
    return pos


def _f(x: float) -> str:
    s = f"{x:.2f}"
    return "0.00" if s == "-0.00" else s


def chart_svg(C: Chart, size: int = 480) -> str:
    """Faces as polygons; b edges thick, c edges dotted, angle symbols at corners."""
    M = C.map
    P = tutte_layout(M)
    r = size * 0.42
    c0 = size / 2

    def xy(p):
        return c0 + r * p[0], c0 - r * p[1]

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f"<title>{C.name or 'chart'}</title>",
    ]
    for f in range(len(M.faces())):
        pts = " ".join(f"{_f(x)},{_f(y)}" for x, y in (xy(P[v]) for v in M.face_vertices(f)))
        out.append(f'<polygon class="face" points="{pts}" fill="#f4f4f4" stroke="none"/>')
    for e in range(M.n_edges):
        u, v = M.edge_ends(e)
        (x1, y1), (x2, y2) = xy(P[u]), xy(P[v])
        lab = C.L[e]
        width = "4" if lab == "b" else "1.2"
        dash = ' stroke-dasharray="2,3"' if lab == "c" else ""
        out.append(
            f'<line class="edge {lab}" x1="{_f(x1)}" y1="{_f(y1)}" x2="{_f(x2)}" y2="{_f(y2)}" '
            f'stroke="#000" stroke-width="{width}"{dash}/>'
        )
    for d in range(M.n_darts):
        s = C.K[d]
        if s is None:
            continue
        v = M.tail[d]
        a, b = P[M.head(d)] - P[v], P[M.head(M.sigma[d])] - P[v]
        a, b = a / np.linalg.norm(a), b / np.linalg.norm(b)
        mid = a + b
        if np.linalg.norm(mid) < 1e-9:
            mid = np.array([-a[1], a[0]])
        mid = mid / np.linalg.norm(mid)
        x, y = xy(P[v] + 0.07 * mid)
        out.append(f'<text class="angle {GREEK[s]}" x="{_f(x)}" y="{_f(y)}" font-size="11" '
                   f'text-anchor="middle" dominant-baseline="middle">{_SYM[s]}</text>')
    for v in range(M.n_vertices):
        x, y = xy(P[v])
        out.append(f'<circle cx="{_f(x)}" cy="{_f(y)}" r="2.5" fill="#000"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render(obj, size: int = 480) -> str:
    if isinstance(obj, Chart):
        return chart_svg(obj, size)
    if isinstance(obj, SphericalTiling):
        return tiling_svg(obj, size)
    raise TypeError(f"cannot render {type(obj).__name__}")
