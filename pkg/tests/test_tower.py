from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from coverlab.config import default_config
from coverlab.tower import (CHECKS, PRINTED_TABLE, LevelRecord, UncertifiedEvenSetError,
                            beauville_bound, node_double_cover_invariants, run_pipeline)


def test_unbranched_double_cover_doubles_chi_and_K2():
    inv = node_double_cover_invariants(3, 5, 0, 0, 0, 0, 2)
    assert (inv["chi"], inv["K2_cover"], inv["K2_minimal"]) == (6, 10, 10)


def test_kummer_configuration_gives_an_abelian_surface():
    # a K3 surface with 16 nodes forming an even set: the cover is a blown-up abelian surface
    inv = node_double_cover_invariants(2, 0, 16, -8, 0, 0, 1)
    assert inv == {"chi": 0, "K2_cover": -16, "K2_minimal": 0, "p_g": 1, "q": 2,
                   "exceptional_curves": 16}


def test_default_nodes_give_the_irregular_surface():
    inv = node_double_cover_invariants(4, 8, 24, -12, 0, 0, 3)
    assert inv == {"chi": 2, "K2_cover": -8, "K2_minimal": 16, "p_g": 3, "q": 2,
                   "exceptional_curves": 24}


def test_uncertified_even_set_refused():
    with pytest.raises(UncertifiedEvenSetError):
        node_double_cover_invariants(4, 8, 24, -12, 0, 0, 3, certified=False)


def test_non_integral_half_class_refused():
    with pytest.raises(ArithmeticError):
        node_double_cover_invariants(4, 8, 1, Fraction(-1, 2), 0, 0, 3)


@given(st.integers(0, 8), st.integers(0, 30), st.integers(0, 6))
def test_cover_invariants_satisfy_chi_relation(n_half, k2, p_g):
    n = 8 * n_half
    chi = 1 + p_g
    inv = node_double_cover_invariants(chi, k2, n, Fraction(-n, 2), 0, 0, p_g)
    assert inv["chi"] == 1 - inv["q"] + inv["p_g"]
    assert inv["K2_minimal"] - inv["K2_cover"] == n


@pytest.mark.parametrize("q,bound,flagged", [(0, 36, False), (2, 18, False), (1, 36, True), (5, 36, True)])
def test_bound_table(q, bound, flagged):
    b = beauville_bound(q)
    assert b.bound == bound and (b.flag is not None) == flagged


def test_bound_rejects_negative_q():
    with pytest.raises(ValueError):
        beauville_bound(-1)


def test_level_record_enforces_chi_relation():
    with pytest.raises(ArithmeticError):
        LevelRecord("bad", 2, 3, 0, 8)


def test_printed_table_constant_is_the_frozen_table():
    # first row of the customary table is xyz against the characters dual to xyz, z, y, x, yz, xz, xy, Id
    assert PRINTED_TABLE[0] == (-1, -1, -1, -1, 1, 1, 1, 1)
    assert PRINTED_TABLE[-1] == (1,) * 8


def level_tuple(lev):
    return lev.chi, lev.p_g, lev.q, lev.K2


def test_levels(default_run):
    lv = default_run.levels
    assert list(lv) == ["X", "Y", "Y'", "S'", "S"]
    assert level_tuple(lv["X"]) == (1, 0, 0, 2)
    assert level_tuple(lv["Y"]) == (4, 3, 0, 8)
    assert level_tuple(lv["Y'"]) == (4, 3, 0, 8) and lv["Y'"].nodes == 24
    assert level_tuple(lv["S'"]) == (2, 3, 2, -8)
    assert level_tuple(lv["S"]) == (2, 3, 2, 16)
    assert lv["S"].canonical_degree == 16
    assert lv["Y"].canonical_degree == 8
    assert lv["X"].canonical_degree is None


def test_every_level_satisfies_chi_relation(default_run, alternate_run):
    for run in (default_run, alternate_run):
        for lev in run.levels.values():
            assert lev.chi == 1 - lev.q + lev.p_g


def test_pipeline_passes_every_check(default_run):
    assert default_run.passed
    assert [c.key for c in default_run.checks] == [k for k, _ in CHECKS]
    assert default_run.headline == {"p_g": 3, "q": 2, "K2": 16, "d": 16}
    assert default_run.bound.bound == 18 and default_run.bound.flag is None


def test_alternate_pencil_member_reproduces_headline(default_run, alternate_run):
    assert alternate_run.passed
    assert alternate_run.headline == default_run.headline
    for name in default_run.levels:
        assert level_tuple(alternate_run.levels[name]) == level_tuple(default_run.levels[name])


def test_failure_is_recorded_with_its_stage():
    bdd = (("D1", "xyz", ("H1",)), ("D2", "z", ("H2",)), ("D3", "y", ("T1", "T2")),
           ("D4", "y", ("T3", "T4")))
    report = run_pipeline(default_config().with_options(building_data=bdd))
    assert not report.passed
    assert report.failed_stage == "building data"
    assert "duplicate" in report.error
    assert report.headline is None


def test_timings_only_when_asked():
    assert run_pipeline().timings == {}
    timed = run_pipeline(timing=True)
    assert set(timed.timings) == {k for k, _ in CHECKS}


def test_tacnodal_half_class_alone_gives_chi_four():
    inv = node_double_cover_invariants(4, 8, 16, -8, 0, 0, 3)
    assert inv["chi"] == 4


def test_minimal_K2_exceeds_cover_K2_by_node_count(default_run):
    s_prime, s = default_run.levels["S'"], default_run.levels["S"]
    assert s.K2 - s_prime.K2 == len(default_run.inventory) == 24
