"""
Pydantic schemas for every document read or written to disk
"""

from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field

from mslcp import config


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


# Instance document
class MaintenanceTypeSchema(StrictModel):
    id: int
    duration_min: int
    interval_hr: float


class OpportunitySchema(StrictModel):
    location: str
    start_hr: float
    end_hr: float


class UnitSchema(StrictModel):
    id: str
    opportunities: List[OpportunitySchema] = Field(default_factory=list)
    # keyed by maintenance type id (as text in JSON)
    initial_age_hr: Dict[int, float] = Field(default_factory=dict)


class PolicySchema(StrictModel):
    day_start: float = config.DEFAULT_DAY_START
    night_start: float = config.DEFAULT_NIGHT_START
    max_day_locations: int = config.DEFAULT_MAX_DAY_LOCATIONS
    teams_per_shift: int = config.DEFAULT_TEAMS_PER_SHIFT
    epsilon: float = config.DEFAULT_EPSILON


class InstanceDocument(StrictModel):
    format_version: str = config.FORMAT_VERSION
    name: Optional[str] = None
    horizon_hr: float
    locations: List[str]
    types: List[MaintenanceTypeSchema]
    units: List[UnitSchema]
    policy: PolicySchema = Field(default_factory=PolicySchema)


# Schedule document
class ScheduledJobSchema(StrictModel):
    job_id: str
    unit: str
    mo_index: int
    types: List[int]
    team: int
    start_min: int
    end_min: int
    release_min: int
    deadline_min: int


class ShiftScheduleSchema(StrictModel):
    location: str
    window: str
    reference_day: int
    in_scope: bool
    teams_used: int
    jobs: List[ScheduledJobSchema]


class ScheduleDocument(StrictModel):
    format_version: str = config.FORMAT_VERSION
    shifts: List[ShiftScheduleSchema]


# Summary document
class PhaseTotals(StrictModel):
    master_s: float
    app_s: float
    cutgen_s: float
    other_s: float
    total_s: float


class SummaryDocument(StrictModel):
    format_version: str = config.FORMAT_VERSION
    status: str
    strategy: str
    iterations: int
    objective: float
    night_count: int
    total_count: int
    initial_violations: int
    final_violations: int
    cumulative_cuts: int
    quarter_violations_iteration: Optional[int] = None
    quarter_violations_elapsed_s: Optional[float] = None
    required_teams_histogram: Dict[int, int] = Field(default_factory=dict)
    phase_totals: PhaseTotals
    phase_means_per_iteration: PhaseTotals


class ErrorRecord(StrictModel):
    format_version: str = config.FORMAT_VERSION
    code: str
    detail: str
    context: Dict[str, object] = Field(default_factory=dict)
