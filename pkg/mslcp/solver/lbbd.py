"""
Decomposition loop: master solve, per-shift capacity check, cuts, repeat
"""

import logging
import time
from collections import Counter
from pathlib import Path
from typing import Callable, Dict, List, Optional

import numpy as np

from mslcp.config import RunSettings

from .checker import check_solution
from .cuts import CutStrategy, generate
from .exceptions import InternalError, MasterTimeoutError, UnsupportedError
from .master import MasterProblem
from .models import (
    CutConstraint,
    CutStrategyKind,
    Instance,
    IterationRecord,
    MasterSolution,
    RunResult,
    RunStatus,
    ScopeKind,
    ShiftKey,
    ShiftSchedule,
    ShiftScope,
)
from .scheduler import AppOracle, min_teams
from .shifts import build_jobs

logger = logging.getLogger(__name__)

OBJECTIVE_TOLERANCE = 1e-9


def default_scope(settings: RunSettings) -> ShiftScope:
    return ShiftScope(ScopeKind.ALL_SHIFTS if settings.include_night else ScopeKind.ALL_DAY_SHIFTS)


def count_violations(solution: MasterSolution, inst: Instance, scope: ShiftScope = ShiftScope()) -> int:
    """In-scope shifts whose jobs need more teams than a shift has."""
    oracle = AppOracle(inst.teams_per_shift)
    return sum(
        1 for shift, jobs in build_jobs(solution, inst).items()
        if scope.contains(shift) and not oracle(jobs)
    )


def required_teams_histogram(
    solution: MasterSolution, inst: Instance, scope: ShiftScope = ShiftScope()
) -> Dict[int, int]:
    """Number of in-scope shifts needing 1, 2, 3, ... teams."""
    counts: Counter = Counter()
    for shift, jobs in build_jobs(solution, inst).items():
        if scope.contains(shift):
            counts[min_teams(jobs, len(jobs)).teams_used] += 1
    return dict(sorted(counts.items()))


def final_schedules(solution: MasterSolution, inst: Instance) -> Dict[ShiftKey, ShiftSchedule]:
    """Minimum-team schedule of every shift with jobs, whatever the team limit."""
    return {
        shift: min_teams(jobs, len(jobs))
        for shift, jobs in build_jobs(solution, inst).items()
    }


def _call_seed(base: int, iteration: int, position: int) -> int:
    return int(np.random.SeedSequence([base, iteration, position]).generate_state(1)[0])


def run(
    inst: Instance,
    strategy: CutStrategy,
    scope: Optional[ShiftScope] = None,
    settings: Optional[RunSettings] = None,
    on_iteration: Optional[Callable[[IterationRecord], None]] = None,
    dump_dir: Optional[Path] = None,
) -> RunResult:
    settings = settings or RunSettings()
    scope = scope or default_scope(settings)
    master = MasterProblem(inst)
    cuts: List[CutConstraint] = []
    known = set()
    history: List[IterationRecord] = []
    solution: Optional[MasterSolution] = None
    status: Optional[RunStatus] = None
    started = time.monotonic()

    logger.info(f"Decomposition start: {len(inst.units)} units, strategy {strategy.label}, "
                f"scope {scope.kind.value}, limit {settings.time_limit_s}s")
    iteration = 0
    while True:
        if history and time.monotonic() - started >= settings.time_limit_s:
            status = RunStatus.TIME_LIMIT
            logger.warning(f"Time limit of {settings.time_limit_s}s reached after {iteration} iterations")
            break
        if settings.max_iterations is not None and iteration >= settings.max_iterations:
            status = RunStatus.ITERATION_LIMIT
            logger.warning(f"Iteration limit of {settings.max_iterations} reached")
            break

        t_iter = time.monotonic()
        budget = settings.master_time_budget_s
        if history:
            remaining = max(settings.time_limit_s - (t_iter - started), 0.0)
            budget = remaining if budget is None else min(budget, remaining)
        try:
            current = master.solve(cuts, budget)
        except MasterTimeoutError as e:
            solution = _best_after_timeout(inst, e, solution, cuts)
            status = RunStatus.TIME_LIMIT
            logger.warning(f"Master stopped in iteration {iteration}: {e.detail}; lower bound {e.lower_bound:.3f}")
            break
        t_master = time.monotonic() - t_iter

        if settings.verify:
            problems = check_solution(inst, current, cuts)
            if problems:
                raise InternalError(f"Master solution fails the checker: {problems[0]}",
                                    iteration=iteration, problems=problems)
        if solution is not None and current.objective < solution.objective - OBJECTIVE_TOLERANCE:
            raise InternalError(f"Master objective decreased from {solution.objective} to {current.objective}",
                                iteration=iteration)
        solution = current

        jobs_by_shift = build_jobs(current, inst)
        oracle = AppOracle(inst.teams_per_shift)
        t_app = t_cut = 0.0
        violated = 0
        added = 0
        for position, (shift, jobs) in enumerate(jobs_by_shift.items()):
            if not scope.contains(shift):
                continue
            t0 = time.monotonic()
            fits = oracle(jobs)
            t_app += time.monotonic() - t0
            if fits:
                continue
            violated += 1
            t0 = time.monotonic()
            new_cuts = _shift_cuts(strategy, jobs, oracle, _call_seed(strategy.rng_seed, iteration, position),
                                   None if dump_dir is None else Path(dump_dir) / f"k{iteration}-{shift.label}")
            t_cut += time.monotonic() - t0
            for cut in new_cuts:
                if cut not in known:
                    known.add(cut)
                    cuts.append(cut)
                    added += 1
            logger.debug(f"Shift {shift.label}: {len(jobs)} jobs over capacity, {len(new_cuts)} cuts")

        elapsed = time.monotonic() - started
        t_total = time.monotonic() - t_iter
        record = IterationRecord(
            iteration=iteration,
            master_objective=current.objective,
            night_count=current.night_count,
            total_count=current.total_count,
            violated_shifts=violated,
            cuts_added=added,
            cumulative_cuts=len(cuts),
            time_master_s=t_master,
            time_app_s=t_app,
            time_cutgen_s=t_cut,
            time_other_s=max(t_total - t_master - t_app - t_cut, 0.0),
            elapsed_s=elapsed,
            app_calls=oracle.calls,
        )
        history.append(record)
        if on_iteration is not None:
            on_iteration(record)
        logger.info(f"Iteration {iteration}: objective ({current.night_count}, {current.total_count}), "
                    f"{violated} violated shifts, {added} new cuts, {len(cuts)} total")

        if added == 0:
            if violated:
                raise InternalError(f"{violated} violated shifts produced no new cuts", iteration=iteration)
            status = RunStatus.OPTIMAL
            break
        iteration += 1

    schedules = final_schedules(solution, inst)
    logger.info(f"Decomposition {status.value}: {len(history)} iterations, "
                f"objective {solution.objective:.3f}, {len(cuts)} cuts")
    return RunResult(
        status=status,
        final_solution=solution,
        schedules=schedules,
        jobs=build_jobs(solution, inst),
        history=history,
        cuts=cuts,
    )


def _shift_cuts(strategy: CutStrategy, jobs, oracle: AppOracle, seed: int, dump_dir: Optional[Path]) -> List[CutConstraint]:
    try:
        return generate(strategy, jobs, oracle, seed, dump_dir=dump_dir)
    except UnsupportedError as e:
        if strategy.kind is not CutStrategyKind.MIN_CUT:
            raise
        fallback = strategy.fallback()
        logger.warning(f"{e.detail}; using {fallback.label} for {oracle.max_teams} teams per shift")
        return generate(fallback, jobs, oracle, seed)


def _best_after_timeout(
    inst: Instance, error: MasterTimeoutError, last: Optional[MasterSolution], cuts: List[CutConstraint]
) -> MasterSolution:
    """The master's incumbent when it satisfies every cut, else the last completed solution."""
    incumbent = error.incumbent
    if incumbent is not None and not check_solution(inst, incumbent, cuts):
        return incumbent
    if last is None:
        raise error
    return last
