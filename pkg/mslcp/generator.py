"""
Synthetic instance generator

Each day every unit is parked at one location with one daytime MO, and spends the night
there with a night MO up to the next morning. A share of the location-days gets two units
with the same short window so that they need two teams if both are maintained there.
"""

import logging
import math
from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, Field, model_validator

from mslcp import config
from mslcp.solver.exceptions import GenerationError
from mslcp.solver.instance import is_daytime, validate
from mslcp.solver.models import Instance, MaintenanceOpportunity, MaintenanceType
from mslcp.solver.shifts import assign_shift

logger = logging.getLogger(__name__)

# Clock times in hours
DAY_MO_START = (8.0, 9.0)
DAY_MO_END = (17.5, 18.5)
NIGHT_MO_START = (20.0, 21.0)
NIGHT_MO_END = (29.0, 30.0)
TIGHT_MO_START = (10.0, 10.5)


class GeneratorSpec(BaseModel):
    units: int = Field(gt=0)
    locations: int = Field(gt=0)
    days: int = Field(default=config.DEFAULT_HORIZON_DAYS, gt=0)
    # (duration in minutes, interval in hours)
    types: List[Tuple[int, float]] = Field(
        default_factory=lambda: [(d, o) for _, d, o in config.DEFAULT_TYPES]
    )
    # probability that a unit has a daytime MO on a given day
    day_mo_density: float = Field(default=1.0, ge=0, le=1)
    pressure: float = Field(default=0.25, ge=0, le=1)
    max_day_locations: int = Field(default=config.DEFAULT_MAX_DAY_LOCATIONS, ge=0)
    seed: int = config.DEFAULT_SEED

    @model_validator(mode="after")
    def check_types(self) -> "GeneratorSpec":
        if not self.types:
            raise ValueError("at least one maintenance type is required")
        for duration, interval in self.types:
            if duration < 1 or interval <= 0:
                raise ValueError(f"invalid maintenance type ({duration}, {interval})")
        return self


def _minutes_between(rng: np.random.Generator, bounds: Tuple[float, float]) -> int:
    lo, hi = (int(round(b * 60)) for b in bounds)
    return int(rng.integers(lo, hi + 1))


def _hours(minutes: int) -> float:
    return minutes / 60


def generate_instance(spec: GeneratorSpec) -> Instance:
    """Deterministic for a given spec, seed included."""
    durations = [d for d, _ in spec.types]
    shortest_window = min(
        int(round((DAY_MO_END[0] - DAY_MO_START[1]) * 60)),
        int(round((NIGHT_MO_END[0] - NIGHT_MO_START[1]) * 60)),
    )
    if max(durations) > shortest_window:
        raise GenerationError(
            f"Maintenance of {max(durations)} min does not fit the {shortest_window} min windows",
            durations=durations,
        )

    rng = np.random.default_rng(spec.seed)
    units = [f"U{i + 1:02d}" for i in range(spec.units)]
    locations = [f"L{i + 1}" for i in range(spec.locations)]
    tight_len = math.ceil(1.5 * min(durations))

    # (unit, day) -> (location, start, end) in minutes from the horizon start
    day_mos = {}
    night_mos = {}
    for day in range(spec.days):
        base = day * 24 * 60
        order = rng.permutation(len(units))
        for slot, u in enumerate(order):
            unit = units[int(u)]
            loc = locations[slot % len(locations)]
            has_day = rng.random() < spec.day_mo_density
            start = base + _minutes_between(rng, DAY_MO_START)
            end = base + _minutes_between(rng, DAY_MO_END)
            if has_day:
                day_mos[(unit, day)] = (loc, start, end)
            n_start = base + _minutes_between(rng, NIGHT_MO_START)
            n_end = base + _minutes_between(rng, NIGHT_MO_END)
            if day < spec.days - 1:
                night_mos[(unit, day)] = (loc, n_start, n_end)

    eligible = []
    for day in range(spec.days):
        for loc in locations:
            present = sorted(u for u in units if (u, day) in day_mos and day_mos[(u, day)][0] == loc)
            if len(present) >= 2:
                eligible.append((day, loc, present))
    target = int(spec.pressure * len(eligible) + 0.5)
    if target:
        chosen = sorted(rng.choice(len(eligible), size=target, replace=False).tolist())
        for index in chosen:
            day, loc, present = eligible[index]
            pair = rng.choice(len(present), size=2, replace=False)
            start = day * 24 * 60 + _minutes_between(rng, TIGHT_MO_START)
            for p in sorted(pair.tolist()):
                day_mos[(present[p], day)] = (loc, start, start + tight_len)

    opportunities = []
    for unit in units:
        mos = [v for (u, _), v in day_mos.items() if u == unit]
        mos += [v for (u, _), v in night_mos.items() if u == unit]
        mos.sort(key=lambda m: (m[1], m[2]))
        for index, (loc, start, end) in enumerate(mos, start=1):
            opportunities.append(MaintenanceOpportunity(unit, index, loc, _hours(start), _hours(end)))

    inst = Instance(
        horizon_hr=24.0 * spec.days,
        locations=tuple(locations),
        types=tuple(MaintenanceType(k, d, o) for k, (d, o) in enumerate(spec.types, start=1)),
        units=tuple(units),
        opportunities=tuple(opportunities),
        max_day_locations=spec.max_day_locations,
    )
    problems = validate(inst)
    if problems:
        raise GenerationError(f"Generated instance is invalid: {problems[0]}", problems=problems)
    logger.debug(f"Generated {len(units)} units, {len(opportunities)} MOs, "
                 f"{target} of {len(eligible)} location-days under pressure")
    return inst


def pressured_fraction(spec: GeneratorSpec) -> float:
    """Share of eligible location-days a generator spec engineers to need two teams."""
    inst = generate_instance(spec)
    tight = math.ceil(1.5 * min(d for d, _ in spec.types))
    shifts = {}
    for mo in inst.opportunities:
        if is_daytime(mo, inst):
            shifts.setdefault(assign_shift(mo, inst), []).append(mo)
    eligible = [mos for mos in shifts.values() if len(mos) >= 2]
    if not eligible:
        return 0.0
    pressured = sum(
        1 for mos in eligible
        if sum(1 for m in mos if int(round((m.end_hr - m.start_hr) * 60)) == tight) >= 2
    )
    return pressured / len(eligible)
