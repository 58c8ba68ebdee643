import pytest

from mslcp.solver.master import solve
from mslcp.solver.models import MasterSolution, ShiftKey, ShiftWindow
from mslcp.solver.shifts import all_shifts, assign_shift, build_jobs, shift_bounds

from conftest import TWO_TYPES, make_instance

DAY = ShiftWindow.DAY
NIGHT = ShiftWindow.NIGHT


def solution_of(x, inst):
    return MasterSolution(
        x=frozenset(x),
        y_day=frozenset(),
        y_night=frozenset(),
        night_count=0,
        total_count=len(x),
        epsilon=inst.epsilon,
    )


@pytest.fixture
def inst():
    return make_instance(
        {
            "u": [("A", 9, 11), ("A", 17, 23)],
            "w": [("B", 18, 19 + 20 / 60), ("B", 20, 30), ("A", 31, 32)],
            "z": [("A", 1, 3)],
        },
        types=TWO_TYPES,
        horizon_hr=48.0,
    )


@pytest.mark.parametrize("unit, index, expected", [
    ("u", 1, ShiftKey("A", DAY, 0)),
    ("u", 2, ShiftKey("A", NIGHT, 0)),
    ("w", 1, ShiftKey("B", NIGHT, 0)),
    ("w", 2, ShiftKey("B", NIGHT, 0)),
    ("w", 3, ShiftKey("A", DAY, 1)),
    ("z", 1, ShiftKey("A", NIGHT, -1)),
])
def test_assign_shift(inst, unit, index, expected):
    assert assign_shift(inst.opportunity(unit, index), inst) == expected


def test_shift_bounds(inst):
    assert shift_bounds(ShiftKey("A", DAY, 1), inst) == (1440 + 420, 1440 + 1140)
    assert shift_bounds(ShiftKey("A", NIGHT, 0), inst) == (1140, 1440 + 420)


def test_label():
    assert ShiftKey("Zl", DAY, 3).label == "Zl-day-d3"


def test_day_job_uses_the_mo_window(inst):
    jobs = build_jobs(solution_of([("u", 1, 1)], inst), inst)
    (job,) = jobs[ShiftKey("A", DAY, 0)]
    assert (job.release_min, job.deadline_min, job.duration_min) == (540, 660, 30)


def test_night_job_is_clipped_to_the_shift(inst):
    jobs = build_jobs(solution_of([("u", 2, 1), ("u", 2, 2)], inst), inst)
    (job,) = jobs[ShiftKey("A", NIGHT, 0)]
    assert (job.release_min, job.deadline_min, job.duration_min) == (1140, 1380, 90)
    assert job.types == frozenset({1, 2})


def test_night_job_starting_before_the_shift_keeps_its_duration(inst):
    jobs = build_jobs(solution_of([("w", 1, 1)], inst), inst)
    (job,) = jobs[ShiftKey("B", NIGHT, 0)]
    assert (job.release_min, job.deadline_min, job.duration_min) == (1130, 1160, 30)


def test_night_job_ending_next_morning(inst):
    jobs = build_jobs(solution_of([("w", 2, 2)], inst), inst)
    (job,) = jobs[ShiftKey("B", NIGHT, 0)]
    assert (job.release_min, job.deadline_min) == (1200, 1440 + 360)


def test_mos_without_activities_make_no_jobs(inst):
    assert build_jobs(solution_of([], inst), inst) == {}


def test_jobs_partition_the_assigned_mos(toy3_instance):
    solution = solve(toy3_instance)
    jobs = build_jobs(solution, toy3_instance)
    seen = [(job.unit, job.mo_index) for shift_jobs in jobs.values() for job in shift_jobs]
    assert sorted(seen) == sorted({(u, j) for u, j, _ in solution.x})
    for shift, shift_jobs in jobs.items():
        assert shift in all_shifts(toy3_instance)
        for job in shift_jobs:
            assert job.shift == shift
            assert job.types == solution.types_at(job.unit, job.mo_index)
