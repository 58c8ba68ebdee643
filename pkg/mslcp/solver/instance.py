"""
Instance data: derived quantities, validation and the JSON instance format
"""

import logging
from pathlib import Path
from typing import FrozenSet, List, Optional, Union

from pydantic import ValidationError

from .exceptions import InstanceError
from .models import Instance, MaintenanceOpportunity, MaintenanceType, to_minutes
from .schemas import (
    InstanceDocument,
    MaintenanceTypeSchema,
    OpportunitySchema,
    PolicySchema,
    UnitSchema,
)

logger = logging.getLogger(__name__)

MINUTES_PER_DAY = 24 * 60


def is_daytime(mo: MaintenanceOpportunity, inst: Instance) -> bool:
    """d_ij: true iff the MO ends inside [day_start, night_start) of its day."""
    clock = mo.end_min % MINUTES_PER_DAY
    return to_minutes(inst.day_start) <= clock < to_minutes(inst.night_start)


def successor_window(inst: Instance, unit: str, mo_index: int, type_id: int) -> FrozenSet[int]:
    """
    V_ijk: indices of the unit's MOs that may host the next activity of type k after MO j.

    For mo_index 0 this is V_i0k, the MOs starting no later than o_k + b_ik.
    """
    if unit not in inst.units:
        raise InstanceError(f"Unknown unit {unit!r}")
    if not inst.has_type(type_id):
        raise InstanceError(f"Unknown maintenance type {type_id!r}")

    interval = inst.maintenance_type(type_id).interval_min
    mos = inst.unit_opportunities(unit)
    if mo_index == 0:
        limit = interval + to_minutes(inst.initial_age(unit, type_id))
        return frozenset(p.index for p in mos if p.start_min <= limit)

    try:
        current = inst.opportunity(unit, mo_index)
    except KeyError:
        raise InstanceError(f"Unit {unit!r} has no MO {mo_index}")
    end = current.end_min
    return frozenset(p.index for p in mos if end < p.start_min <= end + interval)


def validate(inst: Instance) -> List[str]:
    """All invariant violations of the instance; empty when it is well formed."""
    violations: List[str] = []

    if inst.horizon_hr <= 0:
        violations.append(f"horizon {inst.horizon_hr} is not positive")
    if inst.day_start >= inst.night_start:
        violations.append(f"policy: day_start {inst.day_start} is not before night_start {inst.night_start}")
    if inst.max_day_locations < 0:
        violations.append(f"policy: max_day_locations {inst.max_day_locations} is negative")
    if inst.teams_per_shift < 1:
        violations.append(f"policy: teams_per_shift {inst.teams_per_shift} is below 1")
    if inst.epsilon < 0:
        violations.append(f"policy: epsilon {inst.epsilon} is negative")

    seen_types = set()
    for mtype in inst.types:
        if mtype.id in seen_types:
            violations.append(f"type {mtype.id}: duplicate id")
        seen_types.add(mtype.id)
        if mtype.duration_min < 1:
            violations.append(f"type {mtype.id}: duration {mtype.duration_min} min is below 1")
        if mtype.interval_hr <= 0:
            violations.append(f"type {mtype.id}: interval {mtype.interval_hr} h is not positive")

    if len(set(inst.units)) != len(inst.units):
        violations.append("units: duplicate unit ids")
    locations = set(inst.locations)

    for mo in inst.opportunities:
        name = f"opportunity ({mo.unit}, {mo.index})"
        if mo.unit not in inst.units:
            violations.append(f"{name}: unknown unit")
        if mo.location not in locations:
            violations.append(f"{name}: unknown location {mo.location!r}")
        if mo.start_hr < 0:
            violations.append(f"{name}: start {mo.start_hr} h is before the horizon")
        if mo.start_hr >= mo.end_hr:
            violations.append(f"{name}: start {mo.start_hr} h is not before end {mo.end_hr} h")
        if mo.end_hr > inst.horizon_hr:
            violations.append(f"{name}: end {mo.end_hr} h is beyond the horizon")

    for unit in inst.units:
        mos = inst.unit_opportunities(unit)
        if [m.index for m in mos] != list(range(1, len(mos) + 1)):
            violations.append(f"unit {unit}: MO indices are not 1..{len(mos)}")
        starts = [m.start_hr for m in mos]
        if starts != sorted(starts):
            violations.append(f"unit {unit}: MOs are not ordered by start")

    for unit, type_id, age in inst.initial_age_hr:
        if unit not in inst.units or type_id not in seen_types:
            violations.append(f"initial age ({unit}, {type_id}): unknown unit or type")
        if age < 0:
            violations.append(f"initial age ({unit}, {type_id}): {age} h is negative")

    return violations


def from_document(doc: InstanceDocument) -> Instance:
    """Build an instance, numbering each unit's MOs 1.. in order of start."""
    opportunities = []
    ages = []
    for unit in doc.units:
        ordered = sorted(unit.opportunities, key=lambda o: (o.start_hr, o.end_hr, o.location))
        for index, mo in enumerate(ordered, start=1):
            opportunities.append(
                MaintenanceOpportunity(unit.id, index, mo.location, mo.start_hr, mo.end_hr)
            )
        for type_id, age in sorted(unit.initial_age_hr.items()):
            ages.append((unit.id, type_id, age))

    return Instance(
        horizon_hr=doc.horizon_hr,
        locations=tuple(doc.locations),
        types=tuple(MaintenanceType(t.id, t.duration_min, t.interval_hr) for t in doc.types),
        units=tuple(u.id for u in doc.units),
        opportunities=tuple(opportunities),
        initial_age_hr=tuple(ages),
        day_start=doc.policy.day_start,
        night_start=doc.policy.night_start,
        max_day_locations=doc.policy.max_day_locations,
        teams_per_shift=doc.policy.teams_per_shift,
        epsilon=doc.policy.epsilon,
    )


def to_document(inst: Instance, name: str = None) -> InstanceDocument:
    units = []
    for unit in inst.units:
        units.append(UnitSchema(
            id=unit,
            opportunities=[
                OpportunitySchema(location=m.location, start_hr=m.start_hr, end_hr=m.end_hr)
                for m in inst.unit_opportunities(unit)
            ],
            initial_age_hr={k: age for u, k, age in inst.initial_age_hr if u == unit},
        ))
    return InstanceDocument(
        name=name,
        horizon_hr=inst.horizon_hr,
        locations=list(inst.locations),
        types=[
            MaintenanceTypeSchema(id=t.id, duration_min=t.duration_min, interval_hr=t.interval_hr)
            for t in inst.types
        ],
        units=units,
        policy=PolicySchema(
            day_start=inst.day_start,
            night_start=inst.night_start,
            max_day_locations=inst.max_day_locations,
            teams_per_shift=inst.teams_per_shift,
            epsilon=inst.epsilon,
        ),
    )


def parse_instance(text: Union[str, bytes]) -> Instance:
    try:
        doc = InstanceDocument.model_validate_json(text)
    except ValidationError as e:
        raise InstanceError(f"Invalid instance document: {e.error_count()} error(s)",
                            errors=[err["msg"] + " at " + ".".join(map(str, err["loc"])) for err in e.errors()])
    return from_document(doc)


def load_instance(path: Union[str, Path]) -> Instance:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise InstanceError(f"Cannot read instance file {path}: {e}")
    inst = parse_instance(text)
    logger.debug(f"Loaded {path}: {len(inst.units)} units, {len(inst.opportunities)} MOs")
    return inst


def dump_instance(inst: Instance, name: Optional[str] = None) -> str:
    return to_document(inst, name).model_dump_json(indent=2) + "\n"


def save_instance(inst: Instance, path: Union[str, Path], name: Optional[str] = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_instance(inst, name), encoding="utf-8", newline="\n")
    return path
