from __future__ import annotations

import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from brute import gamma1_max_cost, gamma1_total_cost
from conftest import instances, rationals
from ordloc.model import Instance, ModelKind, Objective, objective_value
from ordloc.oracles import (
    OracleBudgetError,
    OracleConfig,
    evaluate_candidate,
    exact_optimum_gamma1,
    grid_optimum,
    is_gamma1,
    optimum_bracket,
)

F = Fraction
SMALL = OracleConfig(grid_cells=60, refine_rounds=1, refine_factor=10)


def lattice_best(inst, objective, cells):
    pts = [F(k, cells) for k in range(cells + 1)]
    vals = [objective_value(inst, y, objective) for y in itertools.product(pts, repeat=inst.m)]
    return min(vals) if objective.is_cost else max(vals)


def test_gamma1_exact_by_hand():
    xs = [F(0), F(1, 10), F(1, 2), F(1)]
    res = exact_optimum_gamma1(xs, Objective.MAX_COST)
    assert res.value == F(1, 4) and res.exact
    assert exact_optimum_gamma1(xs, Objective.TOTAL_COST).value == F(1, 2)
    assert exact_optimum_gamma1(xs, Objective.MIN_UTILITY).value == F(3, 4)
    assert exact_optimum_gamma1(xs, Objective.TOTAL_UTILITY).value == F(7, 2)
    assert exact_optimum_gamma1([F(1, 3)], Objective.MAX_COST).placement == (F(1, 3), F(1, 3))


@settings(max_examples=80, deadline=None)
@given(st.lists(rationals(30), min_size=1, max_size=6))
def test_gamma1_exact_matches_brute_force(xs):
    assert exact_optimum_gamma1(xs, Objective.MAX_COST).value == gamma1_max_cost(xs)
    assert exact_optimum_gamma1(xs, Objective.TOTAL_COST).value == gamma1_total_cost(xs)


@settings(max_examples=80, deadline=None)
@given(st.lists(rationals(30), min_size=1, max_size=6), st.sampled_from(list(Objective)))
def test_gamma1_placement_attains_value(xs, objective):
    inst = Instance.build(xs, [0] * len(xs), (1, 1))
    res = exact_optimum_gamma1(xs, objective)
    assert evaluate_candidate(inst, res.placement, objective) == res.value


def test_is_gamma1():
    assert is_gamma1(Instance.build([0], [0], (1, 1)))
    assert not is_gamma1(Instance.build([0], [0], (1, 2)))
    assert is_gamma1(Instance.build([0], [0], (0, 0), ModelKind.ADDITIVE))


@settings(max_examples=40, deadline=None)
@given(instances(max_n=5, denominator=12), st.sampled_from(list(Objective)))
def test_grid_value_is_attained_and_certified(inst, objective):
    res = grid_optimum(inst, objective, SMALL)
    assert evaluate_candidate(inst, res.placement, objective) == res.value
    # the reference lattice contains points that any placement can only approach
    ref = lattice_best(inst, objective, 24)
    if objective.is_cost:
        assert res.value - res.error_bound <= ref
    else:
        assert res.value + res.error_bound >= ref


@settings(max_examples=30, deadline=None)
@given(instances(max_n=5, denominator=12), st.sampled_from(list(Objective)))
def test_grid_finds_lattice_optimum_when_it_lies_on_the_grid(inst, objective):
    # every agent sits on the 1/12 lattice and G=60 contains it, so the
    # grid search cannot do worse than the best 1/12-lattice placement
    res = grid_optimum(inst, objective, SMALL)
    ref = lattice_best(inst, objective, 12)
    assert res.value <= ref if objective.is_cost else res.value >= ref


@settings(max_examples=30, deadline=None)
@given(instances(max_n=5, m=2, kind=ModelKind.ADDITIVE, denominator=12), st.sampled_from(list(Objective)))
def test_grid_additive_model(inst, objective):
    res = grid_optimum(inst, objective, SMALL)
    assert evaluate_candidate(inst, res.placement, objective) == res.value
    ref = lattice_best(inst, objective, 12)
    assert res.value <= ref if objective.is_cost else res.value >= ref


@settings(max_examples=30, deadline=None)
@given(instances(max_n=5, denominator=30), st.sampled_from(list(Objective)), st.integers(2, 40))
def test_doubling_grid_never_worsens(inst, objective, cells):
    coarse = grid_optimum(inst, objective, OracleConfig(grid_cells=cells, refine_rounds=0))
    fine = grid_optimum(inst, objective, OracleConfig(grid_cells=2 * cells, refine_rounds=0))
    assert fine.value <= coarse.value if objective.is_cost else fine.value >= coarse.value


def test_certificate_shrinks_by_refine_factor():
    inst = Instance.build([F(1, 7), F(2, 7), F(5, 7)], [0, 1, 0], (1, 3))
    res = grid_optimum(inst, Objective.MAX_COST, OracleConfig(grid_cells=100, refine_rounds=2))
    assert res.rounds == 2
    assert [res.bounds[k] / res.bounds[k + 1] for k in range(2)] == [10, 10]
    # max cost: Lipschitz constant alpha_2 = 3, half a final step
    assert res.error_bound == 3 * F(1, 2 * 10_000)
    assert res.step == F(1, 10_000)


def test_three_facilities():
    inst = Instance.build([0, F(1, 2), 1], [0, 1, 2], (1, 2, 3))
    res = grid_optimum(inst, Objective.MAX_COST, OracleConfig(grid_cells=20, refine_rounds=1))
    assert res.value == 0
    assert res.placement == (0, F(1, 2), 1)


def test_large_denominators_fall_back_to_python_integers():
    inst = Instance.build(
        [F(1, 999_983), F(500_000, 999_979), F(999_000, 999_961)], [0, 1, 0], (1, F(1_000_003, 999_999))
    )
    for objective in Objective:
        res = grid_optimum(inst, objective, OracleConfig(grid_cells=50, refine_rounds=1))
        assert evaluate_candidate(inst, res.placement, objective) == res.value


def test_grid_guard():
    inst = Instance.build([0], [0], (1, 2, 3))
    with pytest.raises(OracleBudgetError):
        grid_optimum(inst, Objective.MAX_COST, OracleConfig(grid_cells=1000))


@settings(max_examples=30, deadline=None)
@given(instances(max_n=5, denominator=12), st.sampled_from(list(Objective)))
def test_bracket_contains_lattice_witness_side(inst, objective):
    br = optimum_bracket(inst, objective, SMALL)
    assert br.lo <= br.hi
    ref = lattice_best(inst, objective, 12)
    # the optimum is at most (cost) / at least (utility) any lattice value
    assert br.lo <= ref if objective.is_cost else br.hi >= ref


def test_bracket_is_exact_for_indifferent_agents():
    inst = Instance.build([0, F(1, 3), 1], [0, 1, 0], (1, 1))
    br = optimum_bracket(inst, Objective.MAX_COST)
    assert br.source == "exact" and br.lo == br.hi == F(1, 6)
