from __future__ import annotations

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from coverlab.bicanonical import (ConstructionFalsifiedError, EvaluationMatrix, evaluation_matrix, node_sheet_points,
                                  unique_bicanonical_through_nodes)
from coverlab.cover import pluricanonical_basis
from coverlab.field import SqrtTower
from coverlab.group import GroupElement, char_eval, characters
from coverlab.linalg import ExactMatrix

from oracles import field_to_sympy


@pytest.fixture(scope="module")
def run(default_run):
    return default_run


def test_matrix_shape_and_labels(run):
    ev = run.evaluation
    assert ev.matrix.shape == (24, 12)
    assert ev.column_labels() == ["x^2", "x*y", "x*z", "y^2", "y*z", "z^2",
                                  "u2", "u3", "u4", "u5", "u6", "u7"]
    assert ev.row_labels(("x", "y", "z"))[:2] == ["p1 sheet Id", "p2 sheet z"]


def test_kernel_is_u7(run):
    cert = run.bicanonical
    assert cert.rank == 11
    assert cert.kernel_dimension == 1
    assert cert.kernel_section == "u7"
    assert cert.zero_columns == ["u7"]
    assert cert.quadric_rank == 6
    assert cert.radicand_names == ("D3", "D4")
    assert cert.radicand_squarefree
    assert cert.kernel_annihilated
    assert all(cert.premises.values()) and cert.h0_K_plus_L_vanishes


def test_rank_and_nullity_agree_with_sympy(run):
    m = sympy.Matrix([[field_to_sympy(v) for v in row] for row in run.evaluation.matrix.rows])
    assert m.rank(simplify=True) == 11
    null = m.nullspace(simplify=True)
    assert len(null) == 1
    v = null[0]
    assert all(sympy.simplify(v[j]) == 0 for j in range(11)) and v[11] != 0


def test_kernel_vectors_annihilated_exactly(run):
    m = run.evaluation.matrix
    for v in run.bicanonical.kernel:
        assert all(e.is_zero() for e in m.apply(v))


def test_sheet_points_lie_on_the_cover(run):
    bd = run.configuration.building_data
    chars = [c for c in characters(3) if not c.is_trivial()]
    for p in run.evaluation.points:
        d = {x.name: x.equation(*p.coords) for x in bd.divisors}
        for c in chars:
            rad = 1
            for name in bd.radicand_names(c):
                rad = d[name] * rad
            assert p.value(c) * p.value(c) == rad
        for a in chars:
            for b in chars:
                if a == b:
                    continue
                common = 1
                for x in bd.divisors:
                    if char_eval(a, x.sigma) == -1 and char_eval(b, x.sigma) == -1:
                        common = d[x.name] * common
                assert p.value(a) * p.value(b) == p.value(a + b) * common


def test_nodes_over_one_plane_point_are_distinct_cover_points(run):
    chars = [c for c in characters(3) if not c.is_trivial()]
    groups = {}
    for p in run.evaluation.points:
        groups.setdefault(id(p.node.record), []).append(tuple(p.value(c) for c in chars))
    for values in groups.values():
        assert len(set(values)) == len(values)


group_elements = st.tuples(st.integers(0, 1), st.integers(0, 1), st.integers(0, 1)).map(GroupElement)


@settings(deadline=None, max_examples=12)
@given(st.dictionaries(st.sampled_from([1, 3, 5, 7, 9, 11, 13, 15, 17, 21]), group_elements, max_size=6))
def test_kernel_dimension_independent_of_sign_conventions(run, twists):
    bd = run.configuration.building_data
    basis = pluricanonical_basis(bd, 2)
    points = node_sheet_points(run.inventory, bd, SqrtTower(), twists)
    ev = evaluation_matrix(basis, points)
    cert = unique_bicanonical_through_nodes(bd, run.inventory, evaluation=ev)
    assert cert.kernel_dimension == 1 and cert.kernel_section == "u7"
    assert cert.rank == 11


def test_fewer_points_leave_a_larger_kernel(run):
    bd = run.configuration.building_data
    ev = run.evaluation
    rows = ev.matrix.rows[:16]
    small = EvaluationMatrix(ExactMatrix(rows, 12), ev.sections, ev.points[:16])
    with pytest.raises(ConstructionFalsifiedError):
        unique_bicanonical_through_nodes(bd, run.inventory, evaluation=small)


def test_alternate_member_same_kernel(alternate_run):
    cert = alternate_run.bicanonical
    assert (cert.rank, cert.kernel_dimension, cert.kernel_section) == (11, 1, "u7")
    assert cert.radicand_squarefree
