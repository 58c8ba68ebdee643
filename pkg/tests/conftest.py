"""
Shared test builders
"""

import sys
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import pytest

# Add project root to Python path
project_root = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(project_root))

from mslcp.solver.instance import from_document  # noqa: E402
from mslcp.solver.models import Instance, Job, ShiftSchedule  # noqa: E402
from mslcp.solver.schemas import (  # noqa: E402
    InstanceDocument,
    MaintenanceTypeSchema,
    OpportunitySchema,
    PolicySchema,
    UnitSchema,
)

TWO_TYPES = ((1, 30, 24.0), (2, 60, 48.0))


def make_job(
    name: str,
    release: int,
    deadline: int,
    duration: int,
    mo_index: int = 1,
    types: FrozenSet[int] = frozenset({1}),
) -> Job:
    return Job(name, mo_index, types, release, deadline, duration)


def make_instance(
    units: Dict[str, Sequence[Tuple[str, float, float]]],
    types: Iterable[Tuple[int, int, float]] = ((1, 30, 24.0),),
    horizon_hr: float = 24.0,
    locations: Optional[List[str]] = None,
    ages: Optional[Dict[str, Dict[int, float]]] = None,
    **policy,
) -> Instance:
    """Units map to (location, start_hr, end_hr) MOs; MO indices follow start order."""
    if locations is None:
        locations = sorted({loc for mos in units.values() for loc, _, _ in mos})
    ages = ages or {}
    doc = InstanceDocument(
        horizon_hr=horizon_hr,
        locations=locations,
        types=[MaintenanceTypeSchema(id=k, duration_min=d, interval_hr=o) for k, d, o in types],
        units=[
            UnitSchema(
                id=unit,
                opportunities=[OpportunitySchema(location=l, start_hr=s, end_hr=e) for l, s, e in mos],
                initial_age_hr=ages.get(unit, {}),
            )
            for unit, mos in units.items()
        ],
        policy=PolicySchema(**policy),
    )
    return from_document(doc)


def assert_valid_schedule(jobs: Sequence[Job], schedule: ShiftSchedule) -> None:
    by_id = {j.id: j for j in jobs}
    seen = []
    assert schedule.teams_used == len(schedule.assignments)
    for row in schedule.assignments:
        assert row, "team without jobs"
        for before, after in zip(row, row[1:]):
            assert before.end_min <= after.start_min
        for entry in row:
            job = by_id[entry.job_id]
            assert job.release_min <= entry.start_min
            assert entry.end_min == entry.start_min + job.duration_min
            assert entry.end_min <= job.deadline_min
            seen.append(entry.job_id)
    assert sorted(seen) == sorted(by_id)


@pytest.fixture
def zl_instance():
    from mslcp.fixtures import zl_13_04
    return zl_13_04()


@pytest.fixture
def toy3_instance():
    from mslcp.fixtures import toy3
    return toy3()
