from __future__ import annotations

from collections import Counter
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from coverlab.arrangement import (A1, A3, Arrangement, UnsupportedSingularityError,
                                  classify_arrangement_singularities, type_counts)
from coverlab.plane import GeometryError, PlaneCurve, ProjectivePoint
from coverlab.poly import Polynomial

from oracles import H1, H2, LINES, resultant_multiplicity

OCTIC = [H1, H2, *LINES]
BASE = {"H1": (1, 0, 1), "H2": (2, 1, 2)}


def test_default_octic_counts(building_data):
    points = building_data.singular_points
    assert type_counts(points) == {A3: 8, A1: 10}


def test_point_breakdown_by_pair():
    pts = classify_arrangement_singularities(OCTIC, base_points=BASE)
    by_pair = Counter((frozenset(p.components), p.local_type) for p in pts for _ in range(p.conjugates))
    for h in ("H1", "H2"):
        for t in ("T1", "T2", "T3", "T4"):
            assert by_pair[(frozenset({h, t}), A3)] == 1
    assert by_pair[(frozenset({"H1", "H2"}), A1)] == 4
    assert by_pair[(frozenset({"T1", "T2"}), A1)] == 1
    assert by_pair[(frozenset({"T3", "T4"}), A1)] == 1
    # the four pairs of lines meeting away from the conics
    for a, b in (("T1", "T3"), ("T1", "T4"), ("T2", "T3"), ("T2", "T4")):
        assert by_pair[(frozenset({a, b}), A1)] == 1


def test_rational_points_agree_with_elimination_oracle():
    curves = {c.label: c for c in OCTIC}
    for p in classify_arrangement_singularities(OCTIC, base_points=BASE):
        if p.location is None or not p.location.is_rational():
            continue
        a, b = (curves[n] for n in p.components)
        assert resultant_multiplicity(a, b, p.location.rational_coords()) == p.contact


def test_conic_intersection_is_one_conjugate_orbit():
    pts = [p for p in classify_arrangement_singularities(OCTIC, base_points=BASE)
           if set(p.components) == {"H1", "H2"}]
    assert sum(p.conjugates for p in pts) == 4
    assert all(p.location is None or not p.location.is_rational() for p in pts)


def test_bezout_audit_every_pair():
    records = Arrangement(OCTIC, base_points=BASE).bezout_audit()
    assert len(records) == 15
    assert all(r.ok for r in records)


def _transform(curve: PlaneCurve, n) -> PlaneCurve:
    # f'(v) = f(N v)
    forms = [Polynomial.from_coefficients(list(row), 1) for row in n]
    return PlaneCurve(curve.label, curve.equation.compose(forms).normalized())


@settings(deadline=None, max_examples=6)
@given(st.lists(st.integers(-2, 2), min_size=9, max_size=9))
def test_counts_and_bezout_invariant_under_projective_change(entries):
    n = sympy.Matrix(3, 3, entries)
    if n.det() == 0:
        return
    n_inv = n.inv()
    curves = [_transform(c, n.tolist()) for c in OCTIC]
    base = {}
    for k, p in BASE.items():
        q = n_inv * sympy.Matrix(p)
        base[k] = tuple(Fraction(int(sympy.Rational(c).p), int(sympy.Rational(c).q)) for c in q)
    arr = Arrangement(curves, base_points=base)
    assert type_counts(arr.points()) == {A3: 8, A1: 10}
    assert all(r.ok for r in arr.bezout_audit())


def test_triple_point_rejected():
    through_origin = [PlaneCurve.line(1, 0, 0, "a"), PlaneCurve.line(0, 1, 0, "b"),
                      PlaneCurve.line(1, 1, 0, "c")]
    with pytest.raises(UnsupportedSingularityError, match="triple point"):
        classify_arrangement_singularities(through_origin)


def test_higher_contact_rejected():
    # two conics with contact of order 4 at (0:0:1): y*z = x^2 and y*z = x^2 + y^2
    a = PlaneCurve.conic([1, 0, 0, 0, -1, 0], "a")
    b = PlaneCurve.conic([1, 0, 0, 1, -1, 0], "b")
    with pytest.raises(UnsupportedSingularityError, match="contact of order"):
        classify_arrangement_singularities([a, b])


def test_repeated_component_rejected():
    with pytest.raises(GeometryError):
        classify_arrangement_singularities([LINES[0], PlaneCurve("again", LINES[0].equation.scale(3))])


def test_singular_conic_rejected():
    with pytest.raises(UnsupportedSingularityError):
        classify_arrangement_singularities([PlaneCurve("q", Polynomial.from_coefficients([1, 0, 0, 0, 0, 0], 2))])


def test_general_lines_have_only_nodes():
    lines = [PlaneCurve.line(1, 0, 0, "a"), PlaneCurve.line(0, 1, 0, "b"),
             PlaneCurve.line(0, 0, 1, "c"), PlaneCurve.line(1, 1, 1, "d")]
    pts = classify_arrangement_singularities(lines)
    assert type_counts(pts) == {A1: 6, A3: 0}
    assert ProjectivePoint(1, -1, 0) in [p.location for p in pts]
