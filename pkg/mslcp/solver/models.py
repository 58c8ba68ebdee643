"""
Domain models
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

from mslcp import config


def to_minutes(hours: float) -> int:
    """Hours to whole minutes, rounded to the nearest minute."""
    return int(round(hours * 60))


class ShiftWindow(str, enum.Enum):
    DAY = "day"
    NIGHT = "night"


class CutStrategyKind(str, enum.Enum):
    NAIVE = "naive"
    BASIC_HEURISTIC = "basic"
    BINARY_SEARCH_HEURISTIC = "binary"
    MIN_CUT = "mincut"


class RunStatus(str, enum.Enum):
    OPTIMAL = "optimal"
    TIME_LIMIT = "time_limit"
    ITERATION_LIMIT = "iteration_limit"


class ScopeKind(str, enum.Enum):
    ALL_DAY_SHIFTS = "all_day_shifts"
    ALL_SHIFTS = "all_shifts"
    SELECTED = "selected"


@dataclass(frozen=True)
class MaintenanceType:
    id: int
    duration_min: int
    interval_hr: float

    @property
    def interval_min(self) -> int:
        return to_minutes(self.interval_hr)


@dataclass(frozen=True)
class MaintenanceOpportunity:
    unit: str
    index: int
    location: str
    start_hr: float
    end_hr: float

    @property
    def start_min(self) -> int:
        return to_minutes(self.start_hr)

    @property
    def end_min(self) -> int:
        return to_minutes(self.end_hr)

    @property
    def length_min(self) -> int:
        return self.end_min - self.start_min


@dataclass(frozen=True)
class Instance:
    """Problem data; equality and hashing are by content."""

    horizon_hr: float
    locations: Tuple[str, ...]
    types: Tuple[MaintenanceType, ...]
    units: Tuple[str, ...]
    opportunities: Tuple[MaintenanceOpportunity, ...]
    # (unit, type id, hours since last activity); missing pairs mean 0
    initial_age_hr: Tuple[Tuple[str, int, float], ...] = ()
    day_start: float = config.DEFAULT_DAY_START
    night_start: float = config.DEFAULT_NIGHT_START
    max_day_locations: int = config.DEFAULT_MAX_DAY_LOCATIONS
    teams_per_shift: int = config.DEFAULT_TEAMS_PER_SHIFT
    epsilon: float = config.DEFAULT_EPSILON

    @property
    def horizon_min(self) -> int:
        return to_minutes(self.horizon_hr)

    @cached_property
    def _unit_mos(self) -> Dict[str, Tuple[MaintenanceOpportunity, ...]]:
        grouped: Dict[str, List[MaintenanceOpportunity]] = {u: [] for u in self.units}
        for mo in self.opportunities:
            grouped.setdefault(mo.unit, []).append(mo)
        return {u: tuple(sorted(mos, key=lambda m: m.index)) for u, mos in grouped.items()}

    @cached_property
    def _types_by_id(self) -> Dict[int, MaintenanceType]:
        return {t.id: t for t in self.types}

    @cached_property
    def _ages(self) -> Dict[Tuple[str, int], float]:
        return {(u, k): age for u, k, age in self.initial_age_hr}

    def unit_opportunities(self, unit: str) -> Tuple[MaintenanceOpportunity, ...]:
        return self._unit_mos.get(unit, ())

    def opportunity(self, unit: str, index: int) -> MaintenanceOpportunity:
        for mo in self.unit_opportunities(unit):
            if mo.index == index:
                return mo
        raise KeyError((unit, index))

    def maintenance_type(self, type_id: int) -> MaintenanceType:
        return self._types_by_id[type_id]

    def has_type(self, type_id: int) -> bool:
        return type_id in self._types_by_id

    def initial_age(self, unit: str, type_id: int) -> float:
        return self._ages.get((unit, type_id), 0.0)

    @property
    def type_ids(self) -> Tuple[int, ...]:
        return tuple(sorted(self._types_by_id))


@dataclass(frozen=True, order=True)
class ShiftKey:
    location: str
    window: ShiftWindow
    reference_day: int

    def sort_key(self) -> Tuple[int, str, str]:
        return (self.reference_day, self.window.value, self.location)

    @property
    def label(self) -> str:
        return f"{self.location}-{self.window.value}-d{self.reference_day}"


@dataclass(frozen=True)
class Job:
    unit: str
    mo_index: int
    types: FrozenSet[int]
    release_min: int
    deadline_min: int
    duration_min: int
    shift: Optional[ShiftKey] = None

    def __post_init__(self) -> None:
        for name in ("release_min", "deadline_min", "duration_min"):
            if not isinstance(getattr(self, name), int):
                raise ValueError(f"{name} must be whole minutes")
        if not self.types:
            raise ValueError("job carries no maintenance type")
        if self.duration_min < 1:
            raise ValueError("job duration must be positive")
        if self.deadline_min - self.release_min < self.duration_min:
            raise ValueError(
                f"job {self.id} window [{self.release_min}, {self.deadline_min}] "
                f"is shorter than its duration {self.duration_min}"
            )

    @property
    def id(self) -> str:
        return f"{self.unit}:{self.mo_index}"

    @property
    def latest_start(self) -> int:
        return self.deadline_min - self.duration_min


# (unit, MO index, type set)
CutMember = Tuple[str, int, FrozenSet[int]]


@dataclass(frozen=True)
class CutConstraint:
    """Jobs that must not all be scheduled together: at least one of their activities is dropped."""

    members: FrozenSet[CutMember]

    def __post_init__(self) -> None:
        if not self.members:
            raise ValueError("cut has no members")
        if any(not types for _, _, types in self.members):
            raise ValueError("cut member with an empty type set")

    @classmethod
    def from_jobs(cls, jobs: Iterable[Job]) -> "CutConstraint":
        return cls(frozenset((j.unit, j.mo_index, frozenset(j.types)) for j in jobs))

    def literals(self) -> List[Tuple[str, int, int]]:
        """The (unit, MO, type) activities of the cut, sorted."""
        return sorted((u, j, k) for u, j, types in self.members for k in types)

    def sort_key(self) -> Tuple[int, List[Tuple[str, int, int]]]:
        return (len(self.members), self.literals())

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class MasterSolution:
    x: FrozenSet[Tuple[str, int, int]]
    y_day: FrozenSet[str]
    y_night: FrozenSet[str]
    night_count: int
    total_count: int
    epsilon: float

    @property
    def objective(self) -> float:
        return self.night_count + self.epsilon * self.total_count

    @property
    def objective_pair(self) -> Tuple[int, int]:
        return (self.night_count, self.total_count)

    def types_at(self, unit: str, mo_index: int) -> FrozenSet[int]:
        return frozenset(k for (u, j, k) in self.x if u == unit and j == mo_index)


@dataclass(frozen=True)
class ScheduledJob:
    job_id: str
    start_min: int
    end_min: int


@dataclass(frozen=True)
class ShiftSchedule:
    teams_used: int
    assignments: Tuple[Tuple[ScheduledJob, ...], ...]

    def entries(self) -> Iterable[Tuple[int, ScheduledJob]]:
        for team, row in enumerate(self.assignments, start=1):
            for entry in row:
                yield team, entry

    def team_of(self, job_id: str) -> int:
        for team, entry in self.entries():
            if entry.job_id == job_id:
                return team
        raise KeyError(job_id)


@dataclass(frozen=True)
class ShiftScope:
    kind: ScopeKind = ScopeKind.ALL_DAY_SHIFTS
    shifts: FrozenSet[ShiftKey] = frozenset()

    @classmethod
    def selected(cls, shifts: Iterable[ShiftKey]) -> "ShiftScope":
        return cls(ScopeKind.SELECTED, frozenset(shifts))

    def contains(self, shift: ShiftKey) -> bool:
        if self.kind is ScopeKind.ALL_SHIFTS:
            return True
        if self.kind is ScopeKind.ALL_DAY_SHIFTS:
            return shift.window is ShiftWindow.DAY
        return shift in self.shifts


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    master_objective: float
    night_count: int
    total_count: int
    violated_shifts: int
    cuts_added: int
    cumulative_cuts: int
    time_master_s: float
    time_app_s: float
    time_cutgen_s: float
    time_other_s: float
    elapsed_s: float
    app_calls: int = 0

    @property
    def time_total_s(self) -> float:
        return self.time_master_s + self.time_app_s + self.time_cutgen_s + self.time_other_s


@dataclass
class RunResult:
    status: RunStatus
    final_solution: MasterSolution
    schedules: Dict[ShiftKey, ShiftSchedule]
    jobs: Dict[ShiftKey, Tuple[Job, ...]]
    history: List[IterationRecord] = field(default_factory=list)
    cuts: List[CutConstraint] = field(default_factory=list)

    @property
    def iterations(self) -> int:
        return len(self.history)
