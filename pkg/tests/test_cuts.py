import numpy as np
import pytest

from mslcp.fixtures import fig3_jobs
from mslcp.solver.cuts import (
    CutStrategy,
    basic_heuristic,
    binary_search_heuristic,
    generate,
    min_cut,
    naive,
    parse_strategy,
)
from mslcp.solver.exceptions import ContractViolationError, ScenarioError
from mslcp.solver.models import CutConstraint, CutStrategyKind
from mslcp.solver.scheduler import AppOracle

from conftest import make_job
from oracles import random_jobs, single_team_fits

ALL_STRATEGIES = [
    CutStrategy(CutStrategyKind.NAIVE),
    CutStrategy(CutStrategyKind.BASIC_HEURISTIC, 2),
    CutStrategy(CutStrategyKind.BINARY_SEARCH_HEURISTIC, 3),
    CutStrategy(CutStrategyKind.MIN_CUT),
]


def jobs_of(cut, jobs):
    by_key = {(j.unit, j.mo_index): j for j in jobs}
    return [by_key[(unit, j)] for unit, j, _ in cut.members]


def one_conflict(fillers=10):
    """Two jobs that clash plus fillers that fit around everything."""
    jobs = [make_job("a", 0, 30, 20), make_job("b", 0, 30, 20)]
    jobs += [make_job(f"f{i:02d}", 100 + 30 * i, 120 + 30 * i, 20) for i in range(fillers)]
    return jobs


def random_infeasible(rng):
    while True:
        jobs = random_jobs(rng, int(rng.integers(2, 7)), horizon=150)
        if not single_team_fits(jobs):
            return jobs


@pytest.mark.parametrize("text, kind, count", [
    ("naive", CutStrategyKind.NAIVE, 1),
    ("mincut", CutStrategyKind.MIN_CUT, 1),
    ("basic", CutStrategyKind.BASIC_HEURISTIC, 1),
    ("basic:5", CutStrategyKind.BASIC_HEURISTIC, 5),
    (" Binary:15 ", CutStrategyKind.BINARY_SEARCH_HEURISTIC, 15),
])
def test_parse_strategy(text, kind, count):
    strategy = parse_strategy(text, seed=4)
    assert (strategy.kind, strategy.cuts_per_call, strategy.rng_seed) == (kind, count, 4)


@pytest.mark.parametrize("text", ["greedy", "mincut:2", "naive:1", "binary:0", "basic:x", "binary:-3"])
def test_parse_strategy_rejects(text):
    with pytest.raises(ScenarioError):
        parse_strategy(text)


def test_labels():
    assert parse_strategy("binary:15").label == "binary:15"
    assert parse_strategy("mincut").label == "mincut"
    assert CutStrategy(CutStrategyKind.MIN_CUT).fallback().label == "binary:1"


def test_naive_cut_takes_every_job():
    jobs = fig3_jobs()
    assert naive(jobs) == [CutConstraint.from_jobs(jobs)]


def test_min_cut_on_fig3():
    q1, q2, q3, q4 = fig3_jobs()
    outcome = min_cut(fig3_jobs())
    assert not outcome.fallback_required
    assert set(outcome.cuts) == {CutConstraint.from_jobs([q1, q2]), CutConstraint.from_jobs([q3, q4])}


def test_basic_heuristic_holds_the_clash():
    jobs = [make_job("a", 0, 45, 30), make_job("b", 0, 45, 30), make_job("c", 100, 200, 30)]
    for seed in range(10):
        cut = basic_heuristic(jobs, AppOracle(1), seed)
        units = {unit for unit, _, _ in cut.members}
        assert {"a", "b"} <= units
        assert not single_team_fits(jobs_of(cut, jobs))


def test_basic_heuristic_varies_with_the_seed():
    jobs = [
        make_job("a", 0, 45, 30), make_job("b", 0, 45, 30),
        make_job("c", 100, 145, 30), make_job("d", 100, 145, 30),
    ]
    cuts = {basic_heuristic(jobs, AppOracle(1), seed) for seed in range(15)}
    assert len(cuts) >= 2


@pytest.mark.parametrize("seed", range(100))
def test_basic_heuristic_fits_until_the_last_job(seed):
    rng = np.random.default_rng(seed)
    jobs = random_infeasible(rng)
    steps = []

    def observe(chosen, added):
        assert single_team_fits(chosen)
        steps.append(chosen + added)

    cut = basic_heuristic(jobs, AppOracle(1), seed, observer=observe)
    assert cut == CutConstraint.from_jobs(steps[-1])
    assert not single_team_fits(steps[-1])
    assert single_team_fits(steps[-1][:-1])


@pytest.mark.parametrize("seed", range(100))
def test_binary_search_invariants(seed):
    rng = np.random.default_rng(seed)
    jobs = random_infeasible(rng)
    rounds = []

    def observe(kept, candidates):
        rounds.append((kept, candidates))
        assert single_team_fits(kept)
        assert not single_team_fits(kept + candidates)

    cut = binary_search_heuristic(jobs, AppOracle(1), seed, observer=observe)
    sizes = [len(candidates) for _, candidates in rounds]
    assert sizes[0] == len(jobs)
    assert sizes[-1] == 1
    assert all(later < earlier for earlier, later in zip(sizes, sizes[1:]))
    kept, candidates = rounds[-1]
    assert cut == CutConstraint.from_jobs(kept + candidates)


def test_binary_search_asks_fewer_questions():
    jobs = one_conflict()
    basic_calls = []
    binary_calls = []
    for seed in range(50):
        oracle = AppOracle(1)
        basic_heuristic(jobs, oracle, seed)
        basic_calls.append(oracle.calls)
        oracle = AppOracle(1)
        binary_search_heuristic(jobs, oracle, seed)
        binary_calls.append(oracle.calls)
    assert np.mean(binary_calls) <= np.mean(basic_calls)


@pytest.mark.parametrize("strategy", ALL_STRATEGIES, ids=lambda s: s.label)
@pytest.mark.parametrize("seed", range(100))
def test_every_cut_is_infeasible(strategy, seed):
    rng = np.random.default_rng(10_000 + seed)
    jobs = random_infeasible(rng)
    cuts = generate(strategy, jobs, AppOracle(1), seed)
    assert cuts
    assert len(set(cuts)) == len(cuts)
    for cut in cuts:
        assert not single_team_fits(jobs_of(cut, jobs))


def test_min_cut_falls_back_when_the_relaxation_fits():
    a, b = make_job("a", 0, 3, 2), make_job("b", 1, 2, 1)
    assert min_cut([a, b]).fallback_required
    cuts = generate(CutStrategy(CutStrategyKind.MIN_CUT), [a, b], AppOracle(1), 0)
    assert cuts == [CutConstraint.from_jobs([a, b])]


def test_same_seed_same_cuts():
    jobs = one_conflict(6)
    for strategy in ALL_STRATEGIES:
        assert generate(strategy, jobs, AppOracle(1), 3) == generate(strategy, jobs, AppOracle(1), 3)


def test_generate_refuses_feasible_sets():
    with pytest.raises(ContractViolationError):
        generate(ALL_STRATEGIES[0], [make_job("a", 0, 60, 30)], AppOracle(1))
    with pytest.raises(ContractViolationError):
        generate(ALL_STRATEGIES[0], [], AppOracle(1))
