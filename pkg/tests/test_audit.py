from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from conftest import instances
from ordloc.audit import (
    GROUP_GUARD,
    AuditBudgetError,
    DeviationSpace,
    WelfareMode,
    audit_gsp,
    audit_sp,
    misreported_instance,
    revalidate,
)
from ordloc.mechanisms import MechanismId, place
from ordloc.model import Instance, ModelError, agent_cost, agent_utility

F = Fraction
M = MechanismId
PREFS = DeviationSpace(prefs=True, locations=False)


def test_empty_space_rejected():
    with pytest.raises(ModelError):
        DeviationSpace(prefs=False, locations=False)


def test_options_order_and_exclusion():
    inst = Instance.build([F(1, 2)], [(1, 0)], (1, 2))
    space = DeviationSpace(prefs=True, locations=True, explicit=(F(0), F(1)))
    opts = space.options(inst, 0, space.location_candidates(inst))
    assert opts == [
        (F(0), (0, 1)),
        (F(1, 2), (0, 1)),
        (F(1), (0, 1)),
        (F(0), (1, 0)),
        (F(1), (1, 0)),
    ]


def test_location_candidates_include_true_locations_and_endpoints():
    inst = Instance.build([F(1, 3)], [0], (1, 2))
    cands = DeviationSpace(locations=True, grid=4).location_candidates(inst)
    assert cands == [F(0), F(1, 4), F(1, 3), F(1, 2), F(3, 4), F(1)]


def test_preferred_midpoints_prefs_violation_below_two():
    # agent 1 prefers F2 but is nearer F1's group; declaring F1 drags F1 to 1/8
    inst = Instance.build([0, F(1, 4), 1], [1, 0, 1], (1, F(3, 2)))
    v = audit_sp(M.PREFERRED_MIDPOINTS, inst, PREFS, WelfareMode.UTILITY)
    assert v.violation and v.group == (0,)
    assert v.misreports == ((F(0), (0, 1)),)
    assert v.truthful_placement == (F(1, 4), F(1, 2))
    assert v.deviated_placement == (F(1, 8), F(1))
    assert v.before == (F(1, 2),) and v.after == (F(7, 12),)
    assert revalidate(v, inst)


def test_same_profile_is_safe_at_alpha_two():
    inst = Instance.build([0, F(1, 4), 1], [1, 0, 1], (1, 2))
    assert not audit_sp(M.PREFERRED_MIDPOINTS, inst, PREFS, WelfareMode.UTILITY).violation


def test_location_misreport_on_three_to_one_profile():
    # x = (0, 0, 1/3, 1), tops (F1, F1, F1, F2), alpha = 3/2: agent 3 reporting 1/2
    inst = Instance.build([0, 0, F(1, 3), 1], [0, 0, 0, 1], (1, F(3, 2)))
    space = DeviationSpace(prefs=False, locations=True, explicit=(F(1, 2),))
    v = audit_sp(M.PREFERRED_MIDPOINTS, inst, space, WelfareMode.UTILITY)
    assert v.violation and v.group == (2,)
    assert v.before == (F(5, 6),) and v.after == (F(11, 12),)
    assert revalidate(v, inst)


def test_fixed_center_is_immune():
    inst = Instance.build([0, F(1, 5), 1], [0, 1, 1], (1, 3))
    space = DeviationSpace(prefs=True, locations=True, grid=10)
    v = audit_gsp(M.FIXED_CENTER, inst, space, WelfareMode.COST, 3)
    # 11 locations x 2 rankings - truthful = 21 options each, groups of 1..3
    assert not v.violation and v.examined == 3 * 21 + 3 * 21**2 + 21**3


def test_median_per_facility_location_manipulation_found():
    # the middle agent joins F2's group and drags that median onto itself
    inst = Instance.build([0, F(1, 2), 1], [0, 0, 1], (1, 1))
    space = DeviationSpace(prefs=True, locations=False)
    v = audit_sp(M.MEDIAN_PER_FACILITY, inst, space, WelfareMode.COST)
    assert v.violation
    assert revalidate(v, inst)


def test_agents_filter_and_group_guard():
    inst = Instance.build([0, F(1, 4), 1], [1, 0, 1], (1, F(3, 2)))
    v = audit_sp(M.PREFERRED_MIDPOINTS, inst, PREFS, WelfareMode.UTILITY, agents=[2])
    assert not v.violation
    many = Instance.build([F(k, 20) for k in range(20)], [0] * 20, (1, 2))
    space = DeviationSpace(prefs=True, locations=True, grid=1000)
    with pytest.raises(AuditBudgetError):
        audit_gsp(M.EXTREMES, many, space, WelfareMode.COST, 3)
    assert GROUP_GUARD == 10**7


def test_group_size_bounds():
    inst = Instance.build([0, 1], [0, 1], (1, 2))
    with pytest.raises(ModelError):
        audit_gsp(M.EXTREMES, inst, PREFS, WelfareMode.COST, 3)


def test_revalidate_rejects_tampered_witness():
    inst = Instance.build([0, F(1, 4), 1], [1, 0, 1], (1, F(3, 2)))
    v = audit_sp(M.PREFERRED_MIDPOINTS, inst, PREFS, WelfareMode.UTILITY)
    forged = type(v)(**{**v.__dict__, "deviated_placement": (F(0), F(0))})
    assert not revalidate(forged, inst)


@settings(max_examples=40, deadline=None)
@given(instances(min_n=1, max_n=4))
def test_midpoints_ignore_preference_misreports(inst):
    v = audit_gsp(M.MIDPOINTS, inst, PREFS, WelfareMode.COST, min(3, inst.n))
    assert not v.violation


@settings(max_examples=40, deadline=None)
@given(instances(min_n=1, max_n=4), st.sampled_from(list(WelfareMode)))
def test_any_violation_is_a_strict_gain(inst, mode):
    space = DeviationSpace(prefs=True, locations=True, grid=6)
    v = audit_sp(M.MEDIAN_PER_FACILITY, inst, space, mode)
    if v.violation:
        (i,) = v.group
        reported = misreported_instance(inst, v.group, v.misreports)
        y = place(M.MEDIAN_PER_FACILITY, list(reported.locations), list(reported.tops), 2)
        welfare = agent_cost if mode is WelfareMode.COST else agent_utility
        before = welfare(inst, i, v.truthful_placement)
        after = welfare(inst, i, y)
        assert (after < before) if mode is WelfareMode.COST else (after > before)
