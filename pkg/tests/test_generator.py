import pytest
from pydantic import ValidationError

from mslcp.fixtures import ns_like_spec, toy3_spec
from mslcp.generator import GeneratorSpec, generate_instance, pressured_fraction
from mslcp.solver.exceptions import GenerationError
from mslcp.solver.instance import is_daytime, validate
from mslcp.solver.lbbd import count_violations
from mslcp.solver.master import solve
from mslcp.solver.models import ShiftWindow
from mslcp.solver.scheduler import AppOracle
from mslcp.solver.shifts import all_shifts, build_jobs

from oracles import brute_min_teams


def test_same_spec_same_instance():
    assert generate_instance(toy3_spec()) == generate_instance(toy3_spec())


def test_seed_changes_the_instance():
    other = toy3_spec().model_copy(update={"seed": 8})
    assert generate_instance(other) != generate_instance(toy3_spec())


def test_toy3_shape():
    inst = generate_instance(toy3_spec())
    assert validate(inst) == []
    assert inst.units == ("U01", "U02", "U03")
    assert inst.locations == ("L1", "L2")
    assert inst.horizon_hr == 48.0
    for unit in inst.units:
        mos = inst.unit_opportunities(unit)
        # two day stops and the night in between
        assert [is_daytime(mo, inst) for mo in mos] == [True, False, True]


def test_no_night_mo_on_the_last_day():
    inst = generate_instance(GeneratorSpec(units=4, locations=2, days=3, seed=2))
    assert all(mo.end_hr <= inst.horizon_hr for mo in inst.opportunities)
    night_days = {shift.reference_day for shift in all_shifts(inst) if shift.window.value == "night"}
    assert night_days == {0, 1}


def test_density_zero_leaves_only_nights():
    inst = generate_instance(GeneratorSpec(units=3, locations=2, days=3, day_mo_density=0.0, seed=1))
    assert not any(is_daytime(mo, inst) for mo in inst.opportunities)


def test_policy_and_types_come_from_the_spec():
    spec = GeneratorSpec(units=2, locations=1, days=2, types=[(45, 12.0)], max_day_locations=1, seed=3)
    inst = generate_instance(spec)
    assert [(t.id, t.duration_min, t.interval_hr) for t in inst.types] == [(1, 45, 12.0)]
    assert inst.max_day_locations == 1


def test_pressure_share():
    assert abs(pressured_fraction(ns_like_spec()) - 0.5) <= 0.15
    assert pressured_fraction(toy3_spec().model_copy(update={"pressure": 0.0})) == 0.0


def test_pressure_creates_violations():
    inst = generate_instance(ns_like_spec())
    solution = solve(inst)
    oracle = AppOracle(inst.teams_per_shift)
    recount = 0
    for shift, jobs in build_jobs(solution, inst).items():
        if shift.window is not ShiftWindow.DAY:
            continue
        fits = oracle(jobs)
        if len(jobs) <= 6:
            assert fits == (brute_min_teams(jobs) <= inst.teams_per_shift)
        recount += not fits
    assert count_violations(solution, inst) == recount
    assert recount >= 5


def test_maintenance_longer_than_the_windows():
    with pytest.raises(GenerationError):
        generate_instance(GeneratorSpec(units=2, locations=1, types=[(600, 24.0)]))


@pytest.mark.parametrize("fields", [
    {"pressure": 2.0},
    {"units": 0},
    {"types": []},
    {"types": [(0, 24.0)]},
])
def test_spec_validation(fields):
    base = {"units": 2, "locations": 1}
    with pytest.raises(ValidationError):
        GeneratorSpec(**{**base, **fields})
