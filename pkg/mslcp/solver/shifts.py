"""
Maintenance shifts: MO to shift assignment and job construction from a master solution
"""

import logging
from collections import defaultdict
from typing import Dict, List, Tuple

from .exceptions import InternalError
from .instance import MINUTES_PER_DAY, is_daytime
from .models import (
    Instance,
    Job,
    MaintenanceOpportunity,
    MasterSolution,
    ShiftKey,
    ShiftWindow,
    to_minutes,
)

logger = logging.getLogger(__name__)


def assign_shift(mo: MaintenanceOpportunity, inst: Instance) -> ShiftKey:
    """
    Daytime MOs belong to the day shift of the day they end. Nighttime MOs belong to the
    last night shift they were in: the previous day's when they end before night_start,
    otherwise the current day's.
    """
    end = mo.end_min
    day = end // MINUTES_PER_DAY
    if is_daytime(mo, inst):
        return ShiftKey(mo.location, ShiftWindow.DAY, day)
    if end % MINUTES_PER_DAY < to_minutes(inst.night_start):
        day -= 1
    return ShiftKey(mo.location, ShiftWindow.NIGHT, day)


def shift_bounds(shift: ShiftKey, inst: Instance) -> Tuple[int, int]:
    """Start and end of the shift in minutes from the horizon start."""
    base = shift.reference_day * MINUTES_PER_DAY
    if shift.window is ShiftWindow.DAY:
        return base + to_minutes(inst.day_start), base + to_minutes(inst.night_start)
    return base + to_minutes(inst.night_start), base + MINUTES_PER_DAY + to_minutes(inst.day_start)


def all_shifts(inst: Instance) -> List[ShiftKey]:
    """Every shift some MO of the instance maps to, in (day, window, location) order."""
    return sorted({assign_shift(mo, inst) for mo in inst.opportunities}, key=ShiftKey.sort_key)


def job_window(mo: MaintenanceOpportunity, shift: ShiftKey, duration: int, inst: Instance) -> Tuple[int, int]:
    """Release and deadline of a job of the given duration at this MO."""
    start, end = mo.start_min, mo.end_min
    if shift.window is ShiftWindow.DAY:
        return start, end

    shift_start, shift_end = shift_bounds(shift, inst)
    if end <= shift_end:
        deadline = end
    elif shift_end - start >= duration:
        deadline = shift_end
    else:
        deadline = start + duration

    if start >= shift_start:
        release = start
    elif deadline - shift_start >= duration:
        release = shift_start
    else:
        release = deadline - duration
    return release, deadline


def build_jobs(solution: MasterSolution, inst: Instance) -> Dict[ShiftKey, Tuple[Job, ...]]:
    """One job per MO with at least one assigned activity, grouped by shift; empty shifts omitted."""
    by_mo: Dict[Tuple[str, int], set] = defaultdict(set)
    for unit, mo_index, type_id in solution.x:
        by_mo[(unit, mo_index)].add(type_id)

    grouped: Dict[ShiftKey, List[Job]] = defaultdict(list)
    for (unit, mo_index), types in by_mo.items():
        mo = inst.opportunity(unit, mo_index)
        shift = assign_shift(mo, inst)
        duration = sum(inst.maintenance_type(k).duration_min for k in types)
        release, deadline = job_window(mo, shift, duration, inst)
        try:
            job = Job(unit, mo_index, frozenset(types), release, deadline, duration, shift)
        except ValueError as e:
            raise InternalError(f"Shift rules produced an invalid job for MO ({unit}, {mo_index}): {e}")
        grouped[shift].append(job)

    ordered = {}
    for shift in sorted(grouped, key=ShiftKey.sort_key):
        ordered[shift] = tuple(sorted(grouped[shift], key=lambda j: (j.release_min, j.id)))
    logger.debug(f"Built {sum(len(j) for j in ordered.values())} jobs over {len(ordered)} shifts")
    return ordered
