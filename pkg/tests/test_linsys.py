from fractions import Fraction

import pytest

import invariants
from pdwtile.linsys import LinearSystem, affine_solution, format_form, satisfies, solve, vec


def test_resubstitution():
    invariants.check_solver_resubstitution()


def test_point_solution():
    S = LinearSystem.build([((1, 0, 0, 0), Fraction(1, 2)), ((0, 1, 0, 0), Fraction(1, 3)),
                            ((0, 0, 1, 0), Fraction(1, 4)), ((0, 0, 0, 1), Fraction(1, 5))])
    fz = solve(S)
    assert fz.feasible and fz.space.dim == 0
    assert fz.sample == (Fraction(1, 2), Fraction(1, 3), Fraction(1, 4), Fraction(1, 5))


def test_boundary_is_not_strict():
    S = LinearSystem.build([((1, 0, 0, 0), 1)])
    assert not solve(S, convex=True).feasible
    assert solve(S, convex=False).feasible


def test_inconsistent():
    S = LinearSystem.build([((1, 1, 0, 0), 1), ((1, 1, 0, 0), 2)])
    fz = solve(S)
    assert not fz.feasible and fz.reason == "inconsistent-equations"


def test_forced_disequality():
    S = LinearSystem.build([((1, -1, 0, 0), 0)], [((1, -1, 0, 0), 0, "x")])
    assert solve(S).reason == "forced:x"


def test_disequality_avoided_by_sample():
    S = LinearSystem.build([((1, 1, 1, 1), 2)], [((1, -1, 0, 0), 0, "ab")])
    fz = solve(S)
    assert fz.feasible and fz.sample[0] != fz.sample[1]
    assert satisfies(S, fz.sample)


def test_affine_space_forces():
    sp = affine_solution([(vec((1, -1, 0, 0)), 0), (vec((1, 1, 1, 1)), 2)])
    assert sp.dim == 2
    assert sp.forces((1, -1, 0, 0))
    assert not sp.forces((0, 0, 1, -1))


def test_format():
    assert format_form((1, -2, 0, 1), Fraction(7, 3)) == "α-2β+δ = 7/3"
    with pytest.raises(ValueError):
        vec((1, 2, 3))
