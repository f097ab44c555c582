from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coverlab.cover import (BuildingData, DoublePlane, InvalidBuildingDataError, K_squared,
                            branch_character_classes, chi_structure_sheaf, geometric_genus,
                            h0_plane, intermediate_cover, irregularity, pluricanonical_basis,
                            pullback_split_check, require_valid, split_component_numerics,
                            validate_building_data)
from coverlab.group import Character
from coverlab.plane import GeometryError, PlaneCurve

from oracles import H1, H2, LINES, euler_noether_chi

GENERAL_LINES = [PlaneCurve.line(*v, label=f"L{i}") for i, v in enumerate(
    [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1), (1, 2, 3), (1, -1, 2), (2, 1, -1), (3, -2, 5)], 1)]


def double_plane(curves):
    return BuildingData.build(1, {"x": curves}, ("x",))


def invariants(bd):
    return chi_structure_sheaf(bd), geometric_genus(bd), irregularity(bd), K_squared(bd)


@pytest.mark.parametrize("curves,expected", [
    # (chi, p_g, q, K^2) of double planes: quadric, degree 2 del Pezzo, K3, octic double plane
    ([H1], (1, 0, 0, 8)),
    ([H1, H2], (1, 0, 0, 2)),
    (LINES, (1, 0, 0, 2)),
    ([H1, H2, LINES[0], LINES[1]], (2, 1, 0, 0)),
    (GENERAL_LINES, (4, 3, 0, 2)),
    ([H1, H2, *LINES], (4, 3, 0, 2)),
])
def test_double_plane_invariants(curves, expected):
    bd = double_plane(curves)
    got = invariants(bd)
    assert got == expected
    assert euler_noether_chi(bd, got[3]) == got[0]


def test_default_cover_invariants(building_data):
    assert invariants(building_data) == (4, 3, 0, 8)
    assert euler_noether_chi(building_data, 8) == 4


def test_alternate_pencil_member_cover_invariants(alternate_run):
    bd = alternate_run.configuration.building_data
    assert invariants(bd) == (4, 3, 0, 8)
    assert euler_noether_chi(bd, 8) == 4


def test_character_classes_and_labels(building_data):
    labels = building_data.radical_labels()
    named = {labels[c]: building_data.radicand_names(c) for c in labels}
    assert named == {
        "u1": ("D1", "D2", "D3", "D4"),
        "u2": ("D1", "D2"), "u3": ("D1", "D3"), "u4": ("D1", "D4"),
        "u5": ("D2", "D3"), "u6": ("D2", "D4"), "u7": ("D3", "D4"),
    }
    classes = {labels[c]: n for c, n in branch_character_classes(building_data).items()}
    assert classes == {"u1": 4, "u2": 2, "u3": 2, "u4": 2, "u5": 2, "u6": 2, "u7": 2}


def test_canonical_sections_are_linear_forms(building_data):
    basis = pluricanonical_basis(building_data, 1)
    assert [s.label for s in basis] == ["x", "y", "z"]


def test_bicanonical_basis(building_data):
    basis = pluricanonical_basis(building_data, 2)
    labels = [s.label for s in basis]
    assert labels == ["x^2", "x*y", "x*z", "y^2", "y*z", "z^2", "u2", "u3", "u4", "u5", "u6", "u7"]
    chi, k2 = chi_structure_sheaf(building_data), K_squared(building_data)
    assert len(basis) == chi + k2


@settings(deadline=None, max_examples=10)
@given(st.integers(1, 4))
def test_plurigenera_of_octic_double_plane(m):
    # P_m = chi + m(m-1)/2 K^2 for m >= 2 on a minimal surface of general type
    bd = double_plane(GENERAL_LINES)
    n = len(pluricanonical_basis(bd, m))
    if m == 1:
        assert n == geometric_genus(bd)
    else:
        assert n == chi_structure_sheaf(bd) + m * (m - 1) // 2 * K_squared(bd)


def test_h0_plane():
    assert [h0_plane(n) for n in (-2, -1, 0, 1, 2, 3)] == [0, 0, 1, 3, 6, 10]


def test_intermediate_double_plane(building_data):
    u7 = next(c for c, n in building_data.radical_labels().items() if n == "u7")
    X = intermediate_cover(building_data, u7)
    assert X.describe() == "u^2 = D3*D4"
    assert X.branch_degree == 4
    assert invariants(X.as_building_data()) == (1, 0, 0, 2)
    for conic in (H1, H2):
        assert pullback_split_check(X.equation, conic)
    # a general line meets the branch quartic transversally, so its pullback is irreducible
    assert not pullback_split_check(X.equation, PlaneCurve.line(1, 2, 5))


@pytest.mark.parametrize("conic", [H1, H2], ids=["H1", "H2"])
def test_split_component_numerics(conic, building_data):
    u7 = next(c for c, n in building_data.radical_labels().items() if n == "u7")
    X = intermediate_cover(building_data, u7)
    num = split_component_numerics(conic, 4, X.branch_degree, X)
    assert num.self_intersection == 0
    assert num.canonical_degree == -2
    assert num.genus == 0
    assert num.h0_lower_bound >= 2
    assert num.total_arithmetic_genus == 3
    assert num.pullback_square == 8
    assert num.consistent


def test_split_numerics_refuse_non_split():
    X = double_plane([H2, LINES[0], LINES[1]])
    dp = DoublePlane(None, X.divisors)
    with pytest.raises(GeometryError):
        split_component_numerics(H1, 2, dp.branch_degree, dp)


def _kinds(bd):
    return {v.kind for v in validate_building_data(bd).violations}


def test_parity_violation():
    bd = double_plane([H1, LINES[0]])
    assert "parity" in _kinds(bd)
    with pytest.raises(InvalidBuildingDataError):
        chi_structure_sheaf(bd)


def test_common_component_violation():
    again = PlaneCurve("H1copy", H1.equation)
    bd = BuildingData.build(2, {"x": [H1], "y": [again]}, ("x", "y"))
    assert "common component" in _kinds(bd)


def test_identity_and_non_reduced_violations():
    bd = BuildingData.build(2, {"Id": [H1], "x": [H2, PlaneCurve("H2b", H2.equation)]}, ("x", "y"))
    kinds = _kinds(bd)
    assert "identity" in kinds and "not reduced" in kinds


def test_reducible_cover_flagged():
    bd = BuildingData.build(2, {"x": [H1, H2]}, ("x", "y"))
    report = validate_building_data(bd)
    assert report.ok and not report.irreducible and report.generated_order == 2


def test_default_building_data_valid(building_data):
    report = validate_building_data(building_data)
    assert report.ok and report.irreducible
    require_valid(building_data)
    assert building_data.delta == Fraction(8, 2)
    assert building_data.describe() == ["D1=D_x*y*z=H1", "D2=D_z=H2", "D3=D_y=T1+T2",
                                        "D4=D_x=T3+T4"]


def test_trivial_character_has_no_double_plane(building_data):
    with pytest.raises(ValueError):
        intermediate_cover(building_data, Character.trivial(3))
