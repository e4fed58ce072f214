"""Exact affine systems in the four tile angles (units of pi radians).

Strict feasibility is decided by Fourier-Motzkin elimination over the
parametrised solution space, which never exceeds three free parameters.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

SYMBOLS = ("alpha", "beta", "gamma", "delta")
GREEK = ("α", "β", "γ", "δ")

Vec = tuple[Fraction, Fraction, Fraction, Fraction]


def vec(xs: Iterable) -> Vec:
    v = tuple(Fraction(x) for x in xs)
    if len(v) != 4:
        raise ValueError("angle vectors have four coordinates")
    return v  # type: ignore[return-value]


def format_form(coeffs: Sequence, rhs=None) -> str:
    terms = []
    for c, s in zip(coeffs, GREEK):
        c = Fraction(c)
        if c == 0:
            continue
        mag = "" if abs(c) == 1 else str(abs(c))
        terms.append(("-" if c < 0 else "+") + mag + s)
    text = "".join(terms).lstrip("+") or "0"
    return text if rhs is None else f"{text} = {Fraction(rhs)}"


@dataclass(frozen=True)
class LinearSystem:
    """Equations ``coeffs . x = rhs``, disequalities ``coeffs . x != rhs``.

    ``disequalities`` entries carry a tag naming their source so a failed
    candidate can say which one was forced.
    """

    equations: tuple[tuple[Vec, Fraction], ...] = ()
    disequalities: tuple[tuple[Vec, Fraction, str], ...] = ()

    @classmethod
    def build(cls, equations=(), disequalities=()) -> "LinearSystem":
        eqs = []
        for c, r in equations:
            item = (vec(c), Fraction(r))
            if item not in eqs:
                eqs.append(item)
        dis = [(vec(c), Fraction(r), tag) for c, r, tag in disequalities]
        return cls(tuple(eqs), tuple(dis))

    def with_equations(self, extra) -> "LinearSystem":
        return LinearSystem.build(list(self.equations) + list(extra), self.disequalities)

    def with_disequalities(self, extra) -> "LinearSystem":
        return LinearSystem.build(self.equations, list(self.disequalities) + list(extra))

    def key(self):
        return frozenset(self.equations), frozenset(self.disequalities)


@dataclass(frozen=True)
class AffineSpace:
    """``{base + sum t_k * basis[k]}``; empty basis means a single point."""

    base: Vec
    basis: tuple[Vec, ...]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def point(self, t: Sequence[Fraction]) -> Vec:
        return tuple(self.base[i] + sum(tk * b[i] for tk, b in zip(t, self.basis)) for i in range(4))  # type: ignore[return-value]

    def restrict(self, coeffs: Vec, rhs: Fraction) -> tuple[tuple[Fraction, ...], Fraction]:
        """Express ``coeffs . x - rhs`` as ``lin . t + const``."""
        const = sum(c * b for c, b in zip(coeffs, self.base)) - rhs
        lin = tuple(sum(c * b for c, b in zip(coeffs, v)) for v in self.basis)
        return lin, const

    def forces(self, coeffs: Sequence, rhs=0) -> bool:
        """True iff ``coeffs . x == rhs`` everywhere on the space."""
        lin, const = self.restrict(vec(coeffs), Fraction(rhs))
        return const == 0 and all(x == 0 for x in lin)


@dataclass(frozen=True)
class Feasibility:
    status: str  # "feasible" | "infeasible"
    space: AffineSpace | None = None
    sample: Vec | None = None
    reason: str = ""
    bounds: tuple[Fraction, Fraction] = (Fraction(0), Fraction(1))

    @property
    def feasible(self) -> bool:
        return self.status == "feasible"


def affine_solution(equations) -> AffineSpace | None:
    """Reduced row echelon form over the rationals; None if inconsistent."""
    rows = [list(c) + [r] for c, r in equations]
    pivots: list[int] = []
    r = 0
    for col in range(4):
        p = next((i for i in range(r, len(rows)) if rows[i][col] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        piv = rows[r][col]
        rows[r] = [x / piv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
    for row in rows[r:]:
        if row[4] != 0:
            return None
    free = [c for c in range(4) if c not in pivots]
    base = [Fraction(0)] * 4
    for i, col in enumerate(pivots):
        base[col] = rows[i][4]
    basis = []
    for fcol in free:
        v = [Fraction(0)] * 4
        v[fcol] = Fraction(1)
        for i, col in enumerate(pivots):
            v[col] = -rows[i][fcol]
        basis.append(tuple(v))
    return AffineSpace(tuple(base), tuple(basis))  # type: ignore[arg-type]


def _fm_sample(ineqs: list[tuple[tuple[Fraction, ...], Fraction]], k: int) -> list[Fraction] | None:
    """Find ``t`` with ``lin . t + const > 0`` for all rows, or None.

    Fourier-Motzkin with strict inequalities throughout; the sample is
    rebuilt by back substitution choosing interval midpoints.
    """
    if k == 0:
        return [] if all(c > 0 for _, c in ineqs) else None
    j = k - 1
    lower, upper, rest = [], [], []
    for lin, c in ineqs:
        a = lin[j]
        if a > 0:
            lower.append((lin, c))  # t_j > -(rest + c)/a
        elif a < 0:
            upper.append((lin, c))
        else:
            rest.append((lin[:j], c))
    for ll, lc in lower:
        for ul, uc in upper:
            a, b = ll[j], -ul[j]
            lin = tuple(b * x + a * y for x, y in zip(ll[:j], ul[:j]))
            rest.append((lin, b * lc + a * uc))
    rest = _prune(rest)
    sub = _fm_sample(rest, j)
    if sub is None:
        return None
    lo = max((-(sum(x * t for x, t in zip(l[:j], sub)) + c) / l[j] for l, c in lower), default=None)
    hi = min((-(sum(x * t for x, t in zip(l[:j], sub)) + c) / l[j] for l, c in upper), default=None)
    if lo is None and hi is None:
        tj = Fraction(0)
    elif lo is None:
        tj = hi - 1
    elif hi is None:
        tj = lo + 1
    else:
        tj = (lo + hi) / 2
    return sub + [tj]


def _prune(ineqs):
    """Drop satisfied constant rows and rows dominated by a parallel one."""
    out: dict = {}
    for lin, c in ineqs:
        if all(x == 0 for x in lin):
            if c <= 0:
                return [(lin, c)]
            continue
        g = next(abs(x) for x in lin if x != 0)
        key = tuple(x / g for x in lin)
        cur = out.get(key)
        out[key] = c / g if cur is None else min(cur, c / g)
    return list(out.items())


def solve(S: LinearSystem, convex: bool = True) -> Feasibility:
    """Decide strict feasibility of ``S`` with every angle in ``(0, 1)`` or ``(0, 2)``."""
    upper = Fraction(1 if convex else 2)
    bounds = (Fraction(0), upper)
    space = affine_solution(S.equations)
    if space is None:
        return Feasibility("infeasible", reason="inconsistent-equations", bounds=bounds)
    for c, r, tag in S.disequalities:
        if space.forces(c, r):
            return Feasibility("infeasible", space=space, reason=f"forced:{tag}", bounds=bounds)
    ineqs = []
    for i in range(4):
        e = [Fraction(0)] * 4
        e[i] = Fraction(1)
        lin, const = space.restrict(tuple(e), Fraction(0))  # type: ignore[arg-type]
        ineqs.append((lin, const))
        ineqs.append((tuple(-x for x in lin), upper - const))
    t = _fm_sample(_prune(ineqs), space.dim)
    if t is None:
        return Feasibility("infeasible", space=space, reason="bounds", bounds=bounds)
    sample = space.point(t)
    # nudge off any disequality hyperplane the midpoint happens to hit
    sample = _avoid_hyperplanes(S, space, t, ineqs) or sample
    return Feasibility("feasible", space=space, sample=sample, bounds=bounds)


def _avoid_hyperplanes(S, space, t, ineqs):
    bad = lambda p: any(sum(a * b for a, b in zip(c, p)) == r for c, r, _ in S.disequalities)
    p = space.point(t)
    if not bad(p):
        return p
    # the feasible set is open, so small perturbations stay inside
    for step in (Fraction(1, 97), Fraction(1, 1009), Fraction(1, 10007)):
        for k in range(space.dim):
            for sgn in (1, -1):
                tt = list(t)
                tt[k] += sgn * step
                ok = all(sum(a * b for a, b in zip(lin, tt)) + c > 0 for lin, c in ineqs)
                q = space.point(tt)
                if ok and not bad(q):
                    return q
    return None


def satisfies(S: LinearSystem, x: Sequence, convex: bool = True) -> bool:
    """Exact membership test of a point in the feasible region."""
    x = vec(x)
    upper = 1 if convex else 2
    if not all(0 < xi < upper for xi in x):
        return False
    if any(sum(a * b for a, b in zip(c, x)) != r for c, r in S.equations):
        return False
    return all(sum(a * b for a, b in zip(c, x)) != r for c, r, _ in S.disequalities)
