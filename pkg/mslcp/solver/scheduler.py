"""
Activity planning: minimum number of teams for one shift's jobs
"""

import logging
import math
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from .exceptions import ContractViolationError
from .models import Instance, Job, ScheduledJob, ShiftSchedule

logger = logging.getLogger(__name__)


def moment_bound(jobs: Sequence[Job], inst: Instance) -> int:
    """Largest number of jobs one team can ever need to start within a shift."""
    if not jobs:
        raise ContractViolationError("moment bound of an empty job set")
    shift_min = int(round((inst.night_start - inst.day_start) * 60))
    shortest = min(t.duration_min for t in inst.types)
    return min(math.ceil(shift_min / shortest), len(jobs))


class _TeamSearch:
    """
    Feasibility of a job set on a fixed number of identical teams.

    Jobs are placed in nondecreasing start order, each at the earliest time its team,
    its release and the previous start allow. Every feasible schedule can be shifted
    into that form, so the search is exact.
    """

    def __init__(self, jobs: Sequence[Job], teams: int, busy_until: float = -math.inf):
        self.jobs = {j.id: j for j in jobs}
        self.teams = teams
        # one team may still be busy until the given minute
        self.initial = tuple(sorted([busy_until] + [-math.inf] * (teams - 1)))
        self.dead: Set[Tuple[FrozenSet[str], Tuple[int, ...], int]] = set()
        self.order = sorted(jobs, key=lambda j: (j.latest_start, j.deadline_min, j.id))

    def run(self) -> Optional[List[Tuple[str, int, int]]]:
        free = self.initial
        placed: List[Tuple[str, int, int]] = []
        if self._place(frozenset(self.jobs), free, -math.inf, placed):
            return placed
        return None

    def _place(self, remaining: FrozenSet[str], free: Tuple, last: float, placed: List) -> bool:
        if not remaining:
            return True
        key = (remaining, free, last)
        if key in self.dead:
            return False

        earliest_free = min(free)
        for job_id in remaining:
            job = self.jobs[job_id]
            if max(job.release_min, earliest_free, last) + job.duration_min > job.deadline_min:
                self.dead.add(key)
                return False

        for job in self.order:
            if job.id not in remaining:
                continue
            floor = max(job.release_min, last)
            options = []
            idle = [t for t, f in enumerate(free) if f <= floor]
            if idle:
                options.append(max(idle, key=lambda t: (free[t], -t)))
            seen = set()
            for t, f in enumerate(free):
                if f > floor and f not in seen:
                    seen.add(f)
                    options.append(t)

            for team in options:
                start = max(floor, free[team])
                end = start + job.duration_min
                if end > job.deadline_min:
                    continue
                nxt = list(free)
                nxt[team] = end
                placed.append((job.id, team, start))
                if self._place(remaining - {job.id}, tuple(sorted(nxt)), start, placed):
                    return True
                placed.pop()
        self.dead.add(key)
        return False


def _fits(jobs: Sequence[Job], teams: int, busy_until: float = -math.inf) -> bool:
    if not jobs:
        return True
    if teams < 1:
        return False
    return _TeamSearch(jobs, teams, busy_until).run() is not None


def _canonical(jobs: Sequence[Job], teams: int) -> ShiftSchedule:
    """
    Lexicographically smallest schedule by (team, start, job id) on the given teams.

    Team rows are filled in turn, each time with the earliest (start, job id) after which
    the remaining jobs still fit on this team and the ones not yet used.
    """
    remaining = {j.id: j for j in jobs}
    rows = []
    for team in range(teams):
        if not remaining:
            break
        row = []
        free = -math.inf
        while remaining:
            candidates = sorted(
                (max(free, j.release_min), j.id) for j in remaining.values()
                if max(free, j.release_min) + j.duration_min <= j.deadline_min
            )
            chosen = None
            for start, job_id in candidates:
                end = start + remaining[job_id].duration_min
                rest = [j for i, j in remaining.items() if i != job_id]
                if _fits(rest, teams - team, end):
                    chosen = ScheduledJob(job_id, start, end)
                    break
            if chosen is None:
                break
            row.append(chosen)
            free = chosen.end_min
            del remaining[chosen.job_id]
        if row:
            rows.append(tuple(row))
    return ShiftSchedule(teams_used=len(rows), assignments=tuple(rows))


def _checked(jobs: Iterable[Job], max_teams: int) -> List[Job]:
    if max_teams < 1:
        raise ContractViolationError(f"max_teams must be at least 1, got {max_teams}")
    jobs = list(jobs)
    for job in jobs:
        if not isinstance(job, Job):
            raise ContractViolationError(f"not a job: {job!r}")
    jobs.sort(key=lambda j: j.id)
    if len({j.id for j in jobs}) != len(jobs):
        raise ContractViolationError("duplicate job ids in one shift")
    return jobs


def min_teams(jobs: Iterable[Job], max_teams: int) -> Optional[ShiftSchedule]:
    """
    Schedule with the fewest teams, or None when more than max_teams would be needed.

    Among the schedules with the fewest teams the lexicographically smallest by
    (team, start, job id) is returned.
    """
    jobs = _checked(jobs, max_teams)
    for n in range(1, min(max_teams, len(jobs)) + 1):
        if _fits(jobs, n):
            return _canonical(jobs, n)
    if not jobs:
        return ShiftSchedule(teams_used=0, assignments=())
    return None


def is_feasible(jobs: Iterable[Job], max_teams: int) -> bool:
    jobs = _checked(jobs, max_teams)
    return _fits(jobs, min(max_teams, len(jobs)))


class AppOracle:
    """Feasibility oracle with a call counter and a cache keyed by job set."""

    def __init__(self, max_teams: int):
        if max_teams < 1:
            raise ContractViolationError(f"max_teams must be at least 1, got {max_teams}")
        self.max_teams = max_teams
        self.calls = 0
        self._cache: Dict[FrozenSet[Job], bool] = {}

    def __call__(self, jobs: Iterable[Job]) -> bool:
        jobs = list(jobs)
        key = frozenset(jobs)
        self.calls += 1
        if key not in self._cache:
            self._cache[key] = is_feasible(jobs, self.max_teams)
        return self._cache[key]
