from __future__ import annotations

from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from coverlab.field import FieldElement
from coverlab.plane import (ConfigurationError, DegeneracyError, InfiniteMultiplicityError,
                            PlaneCurve, ProjectivePoint, conic_determinant, dual_conic,
                            intersection_multiplicity, meet, parametrize, rational_point_on_conic,
                            restriction_is_square, tangent_conic_pencil, tangent_line)
from coverlab.poly import Polynomial

from oracles import H1, H2, LINES, S, T, X, Y, Z, resultant_multiplicity


TANGENCIES = [
    (H1, "T1", (1, 0, 1)), (H1, "T2", (1, 0, -1)), (H1, "T3", (0, 1, 1)), (H1, "T4", (0, 1, -1)),
    (H2, "T1", (2, 1, 2)), (H2, "T2", (2, 1, -2)), (H2, "T3", (1, 2, 2)), (H2, "T4", (1, 2, -2)),
]


@pytest.mark.parametrize("conic,line,point", TANGENCIES)
def test_tangency_multiplicity_two(conic, line, point):
    ln = next(l for l in LINES if l.label == line)
    assert intersection_multiplicity(conic, ln, point) == 2
    assert resultant_multiplicity(conic, ln, point) == 2


def test_line_pair_nodes_are_transverse():
    p = meet(LINES[0].line_vector(), LINES[1].line_vector())
    assert p == ProjectivePoint(0, 1, 0)
    assert intersection_multiplicity(LINES[0], LINES[1], p) == 1
    assert resultant_multiplicity(LINES[0], LINES[1], p.rational_coords()) == 1


def test_reducible_curve_multiplicity_sums_components():
    pair = PlaneCurve("T1T2", LINES[0].equation * LINES[1].equation)
    assert intersection_multiplicity(H1, pair, (1, 0, 1)) == 2
    with pytest.raises(InfiniteMultiplicityError):
        intersection_multiplicity(pair, LINES[0], (1, 0, 1))


def test_dual_conic_contains_tangent_lines():
    dual = dual_conic(H2)
    par = parametrize(H2)
    for s, t in [(1, 0), (0, 1), (1, 1), (2, -3), (5, 7)]:
        p = par(s, t)
        assert H2.contains(p)
        assert dual.contains(tangent_line(H2, p))
    assert dual_conic(dual).same_curve(H2)


def test_dual_of_singular_conic_rejected():
    with pytest.raises(DegeneracyError):
        dual_conic(PlaneCurve.conic([1, 0, 0, -1, 0, 0]))


def test_pencil_members_and_degeneracies():
    pencil = tangent_conic_pencil(LINES)
    roots, at_infinity = pencil.degenerate_parameters()
    assert roots == [-2, 2] and at_infinity
    assert pencil.member(0).same_curve(H1)
    assert pencil.member(1).same_curve(H2)
    assert pencil.member(3).same_curve(PlaneCurve.conic([4, -12, 0, 4, 0, 5]))
    for t in (2, -2):
        assert pencil.is_degenerate(t)
        with pytest.raises(DegeneracyError):
            pencil.member(t)


@settings(deadline=None, max_examples=15)
@given(st.fractions(min_value=-9, max_value=9, max_denominator=5).filter(lambda t: t not in (2, -2)))
def test_every_smooth_pencil_member_is_tangent_to_all_lines(t):
    member = tangent_conic_pencil(LINES).member(t)
    assert conic_determinant(member) != 0
    dual = dual_conic(member)
    for line in LINES:
        assert dual.contains(line.line_vector())


def test_pencil_needs_four_distinct_general_lines():
    with pytest.raises(ConfigurationError, match="not distinct"):
        tangent_conic_pencil([LINES[0], LINES[0], LINES[2], LINES[3]])
    with pytest.raises(ConfigurationError, match="concurrent"):
        tangent_conic_pencil([LINES[0], LINES[1], PlaneCurve.line(1, 0, 0, "x"), LINES[3]])


def test_stereographic_parametrization_of_unit_conic():
    par = parametrize(H1, (1, 0, 1))
    got = [f.to_sympy() for f in par.forms]
    want = [S ** 2 - T ** 2, 2 * S * T, S ** 2 + T ** 2]
    ratio = None
    for g, w in zip(got, want):
        q = sympy.cancel(g / w)
        assert q.is_number
        ratio = ratio or q
        assert q == ratio
    assert sympy.expand(H1.equation.to_sympy().subs({X: got[0], Y: got[1], Z: got[2]},
                                                    simultaneous=True)) == 0


@settings(deadline=None, max_examples=25)
@given(st.integers(-6, 6), st.integers(-6, 6))
def test_parametrization_preimage_round_trip(s, t):
    if s == 0 and t == 0:
        return
    for curve in (H2, LINES[2]):
        par = parametrize(curve)
        p = par.point(s, t)
        s2, t2 = par.preimage(p)
        assert par.point(s2, t2) == p


def test_rational_point_found_by_search():
    p = rational_point_on_conic(H2)
    assert H2.contains(p)


def sympy_is_square(f: Polynomial, conic: PlaneCurve) -> bool:
    # oracle: factor the restricted binary form with sympy and inspect exponents and content
    par = parametrize(conic)
    g = par.restrict(f).to_sympy()
    c, factors = sympy.factor_list(g, S, T)
    c = sympy.Rational(c)
    return all(k % 2 == 0 for _, k in factors) and c > 0 and sympy.sqrt(c).is_rational


D3D4 = (LINES[0].equation * LINES[1].equation) * (LINES[2].equation * LINES[3].equation)


@pytest.mark.parametrize("conic", [H1, H2], ids=["H1", "H2"])
@pytest.mark.parametrize("label,f", [
    ("d3d4", D3D4),
    ("d3", LINES[0].equation * LINES[1].equation),
    ("d4", LINES[2].equation * LINES[3].equation),
    ("T1", LINES[0].equation * LINES[0].equation * LINES[1].equation),
])
def test_restriction_square_matches_factor_oracle(conic, label, f):
    ok, root = restriction_is_square(f, conic)
    assert ok == sympy_is_square(f, conic)
    if ok:
        assert root * root == parametrize(conic).restrict(f)


def test_d3d4_on_unit_conic_is_square_of_explicit_quartic():
    par = parametrize(H1, (1, 0, 1))
    ok, root = restriction_is_square(D3D4, H1, par)
    assert ok
    # in the chart s = 1 the root is proportional to 2t(1 - t^2) times the conic's scale
    r = sympy.Poly(root.to_sympy().subs(S, 1), T)
    target = sympy.Poly(2 * T * (1 - T ** 2), T)
    q = sympy.cancel(r.as_expr() / target.as_expr())
    assert q.is_number and q != 0


def test_point_normalization_and_equality():
    assert ProjectivePoint(2, 4, 6) == ProjectivePoint(1, 2, 3)
    assert ProjectivePoint(-1, 0, 1).rational_coords() == (1, 0, -1)
    with pytest.raises(ValueError):
        ProjectivePoint(0, 0, 0)
    from coverlab.field import SqrtTower
    s = SqrtTower().sqrt(3)
    p = ProjectivePoint(s, FieldElement.coerce(1), s * 2)
    assert not p.is_rational()
    assert p == ProjectivePoint(s * s, s, Fraction(6))
