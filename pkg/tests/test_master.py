import math

import numpy as np
import pytest

from mslcp.solver.checker import check_solution
from mslcp.solver.exceptions import MasterInfeasibleError, MasterTimeoutError
from mslcp.solver.master import MasterProblem, lower_bound, solve
from mslcp.solver.models import CutConstraint, MasterSolution

from conftest import TWO_TYPES, make_instance
from oracles import brute_master, random_instance


def test_night_only_unit():
    inst = make_instance({"u": [("A", 20, 22)]})
    solution = solve(inst)
    assert solution.objective_pair == (1, 1)
    assert solution.objective == pytest.approx(1.001)
    assert solution.y_night == frozenset({"A"})
    assert solution.y_day == frozenset()


def test_day_mo_is_preferred():
    inst = make_instance({"u": [("A", 9, 11), ("B", 20, 22)]})
    solution = solve(inst)
    assert solution.x == frozenset({("u", 1, 1)})
    assert solution.objective == pytest.approx(0.001)
    assert solution.y_day == frozenset({"A"})


def test_closed_day_locations_push_work_to_the_night():
    inst = make_instance({"u": [("A", 9, 11), ("B", 20, 22)]}, max_day_locations=0)
    solution = solve(inst)
    assert solution.x == frozenset({("u", 2, 1)})
    assert solution.objective_pair == (1, 1)


def test_opening_limit_picks_the_cheaper_location():
    inst = make_instance(
        {"u": [("A", 9, 11), ("C", 20, 22)], "w": [("B", 9, 11), ("C", 20, 22)], "z": [("B", 9, 11), ("C", 20, 22)]},
        max_day_locations=1,
    )
    solution = solve(inst)
    assert solution.y_day == frozenset({"B"})
    assert solution.objective_pair == (1, 3)


def test_follow_up_activity_within_the_interval():
    inst = make_instance({"u": [("A", 9, 10), ("A", 20, 21), ("A", 33, 34)]}, horizon_hr=48.0)
    solution = solve(inst)
    assert solution.x == frozenset({("u", 1, 1), ("u", 3, 1)})
    assert solution.objective_pair == (0, 2)


def test_mo_too_short_for_both_types():
    inst = make_instance({"u": [("A", 9, 10), ("A", 20, 23)]}, types=TWO_TYPES)
    solution = solve(inst)
    assert solution.types_at("u", 1) == frozenset({1})
    assert solution.types_at("u", 2) == frozenset({2})
    assert solution.objective_pair == (1, 2)


def test_zl_first_master_solution(zl_instance):
    solution = solve(zl_instance)
    assert solution.objective_pair == (1, 10)
    assert solution.types_at("2404", 1) == frozenset({1})
    assert solution.types_at("2404", 2) == frozenset({2})
    assert check_solution(zl_instance, solution) == []


def test_cut_forces_an_activity_out(zl_instance):
    cut = CutConstraint(frozenset({("2404", 1, frozenset({1})), ("2412", 1, frozenset({1, 2}))}))
    solution = solve(zl_instance, [cut])
    assert solution.objective_pair == (2, 10)
    assert solution.types_at("2404", 1) == frozenset()
    assert check_solution(zl_instance, solution, [cut]) == []


def test_toy3_matches_enumeration(toy3_instance):
    assert solve(toy3_instance).objective_pair == brute_master(toy3_instance)


def _outcome(inst, cuts):
    try:
        solution = solve(inst, cuts)
    except MasterInfeasibleError:
        return None, None
    return solution.objective_pair, solution


@pytest.mark.parametrize("seed", range(50))
def test_random_instances_match_enumeration(seed):
    rng = np.random.default_rng(seed)
    inst = random_instance(rng)
    pair, solution = _outcome(inst, [])
    assert pair == brute_master(inst)
    if solution is None:
        return
    assert check_solution(inst, solution) == []

    # forbid everything done at one MO of the optimum
    unit, j, _ = sorted(solution.x)[int(rng.integers(len(solution.x)))]
    cut = CutConstraint(frozenset({(unit, j, solution.types_at(unit, j))}))
    cut_pair, cut_solution = _outcome(inst, [cut])
    assert cut_pair == brute_master(inst, [cut])
    if cut_solution is not None:
        assert check_solution(inst, cut_solution, [cut]) == []
        assert cut_solution.objective >= solution.objective


@pytest.mark.parametrize("seed", range(50))
def test_several_cuts_match_enumeration(seed):
    rng = np.random.default_rng(700 + seed)
    inst = random_instance(rng)
    _, solution = _outcome(inst, [])
    if solution is None:
        return
    visits = sorted({(u, j) for u, j, _ in solution.x})
    cuts = []
    for _ in range(int(rng.integers(2, 4))):
        size = int(rng.integers(1, min(3, len(visits)) + 1))
        picked = rng.choice(len(visits), size=size, replace=False)
        cuts.append(CutConstraint(frozenset(
            (visits[i][0], visits[i][1], solution.types_at(*visits[i])) for i in sorted(picked.tolist())
        )))
    cut_pair, cut_solution = _outcome(inst, cuts)
    assert cut_pair == brute_master(inst, cuts)
    if cut_solution is not None:
        assert check_solution(inst, cut_solution, cuts) == []


def test_more_cuts_never_lower_the_objective(zl_instance):
    master = MasterProblem(zl_instance)
    first = master.solve()
    cuts = [CutConstraint(frozenset({("2404", 1, frozenset({1})), ("2412", 1, frozenset({1, 2}))}))]
    second = master.solve(cuts)
    cuts.append(CutConstraint(frozenset({("2411", 1, frozenset({1, 2}))})))
    third = master.solve(cuts)
    assert first.objective <= second.objective <= third.objective


def test_lower_bound_is_the_optimum_when_the_search_completes(zl_instance):
    assert lower_bound(zl_instance) == pytest.approx(solve(zl_instance).objective)


def test_lower_bound_of_infeasible_master_is_infinite():
    inst = make_instance({"u": [("A", 9, 9.25)]})
    assert lower_bound(inst) == math.inf


def test_infeasible_master():
    inst = make_instance({"u": [("A", 9, 9.25)]})
    with pytest.raises(MasterInfeasibleError) as err:
        solve(inst)
    assert err.value.code == "master_infeasible"


def test_cut_on_a_forced_activity_makes_the_master_infeasible():
    inst = make_instance({"u": [("A", 9, 11)]})
    cut = CutConstraint(frozenset({("u", 1, frozenset({1}))}))
    with pytest.raises(MasterInfeasibleError) as err:
        solve(inst, [cut])
    context = err.value.to_record()["context"]
    assert context["cut_count"] == 1
    assert context["cuts"] == [[["u", 1, 1]]]


def test_exhausted_budget(zl_instance):
    with pytest.raises(MasterTimeoutError) as err:
        solve(zl_instance, time_budget=1e-9)
    assert err.value.lower_bound <= solve(zl_instance).objective + 1e-12


def test_repeated_solves_agree(toy3_instance):
    cuts = []
    first = solve(toy3_instance, cuts)
    assert solve(toy3_instance, cuts) == first
    assert MasterProblem(toy3_instance).solve(cuts) == first


def test_checker_flags_missing_activity(zl_instance):
    solution = solve(zl_instance)
    dropped = MasterSolution(
        x=solution.x - {("2411", 1, 1)},
        y_day=solution.y_day,
        y_night=solution.y_night,
        night_count=solution.night_count,
        total_count=solution.total_count - 1,
        epsilon=solution.epsilon,
    )
    problems = check_solution(zl_instance, dropped)
    assert len(problems) == 1
    assert "unit 2411, type 1" in problems[0]


def test_checker_flags_location_and_count_errors(zl_instance):
    solution = solve(zl_instance)
    wrong = MasterSolution(
        x=solution.x,
        y_day=frozenset(),
        y_night=solution.y_night,
        night_count=0,
        total_count=solution.total_count,
        epsilon=solution.epsilon,
    )
    problems = check_solution(zl_instance, wrong)
    assert any("Zl used but not open" in p for p in problems)
    assert any("reported counts" in p for p in problems)


def test_checker_flags_violated_cut(zl_instance):
    solution = solve(zl_instance)
    cut = CutConstraint(frozenset({("2404", 1, frozenset({1})), ("2412", 1, frozenset({1, 2}))}))
    problems = check_solution(zl_instance, solution, [cut])
    assert problems == ["cut over [('2404', 1), ('2412', 1)] is violated"]
