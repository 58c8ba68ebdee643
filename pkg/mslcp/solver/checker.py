"""
Master solution checker

Re-evaluates every master constraint directly from the instance data. Nothing here is
shared with master.py.
"""

from collections import defaultdict
from typing import Dict, Iterable, List, Set, Tuple

from .models import CutConstraint, Instance, MasterSolution


def _minutes(hours: float) -> int:
    return int(round(hours * 60))


def check_solution(inst: Instance, solution: MasterSolution, cuts: Iterable[CutConstraint] = ()) -> List[str]:
    """Every violated master constraint, as text; empty when the solution is feasible."""
    problems: List[str] = []
    mos = {(mo.unit, mo.index): mo for mo in inst.opportunities}
    types = {t.id: t for t in inst.types}
    ages = {(u, k): age for u, k, age in inst.initial_age_hr}
    day_from, day_to = _minutes(inst.day_start), _minutes(inst.night_start)

    def daytime(mo) -> bool:
        return day_from <= _minutes(mo.end_hr) % 1440 < day_to

    assigned: Dict[Tuple[str, int], Set[int]] = defaultdict(set)
    for unit, j, k in solution.x:
        if (unit, j) not in mos:
            problems.append(f"assignment ({unit}, {j}, {k}): unknown MO")
            continue
        if k not in types:
            problems.append(f"assignment ({unit}, {j}, {k}): unknown type")
            continue
        assigned[(unit, j)].add(k)
    if problems:
        return problems

    # locations
    day_used = {mos[key].location for key in assigned if daytime(mos[key])}
    night_used = {mos[key].location for key in assigned if not daytime(mos[key])}
    if len(solution.y_day) > inst.max_day_locations:
        problems.append(f"{len(solution.y_day)} daytime locations open, limit {inst.max_day_locations}")
    for loc in sorted(day_used - set(solution.y_day)):
        problems.append(f"daytime location {loc} used but not open")
    for loc in sorted(night_used - set(solution.y_night)):
        problems.append(f"nighttime location {loc} used but not open")

    # available time per MO
    for (unit, j), ks in sorted(assigned.items()):
        mo = mos[(unit, j)]
        needed = sum(types[k].duration_min for k in ks)
        available = _minutes(mo.end_hr) - _minutes(mo.start_hr)
        if needed > available:
            problems.append(f"MO ({unit}, {j}): {needed} min of maintenance in {available} min")

    # intervals
    horizon = _minutes(inst.horizon_hr)
    for unit in inst.units:
        unit_mos = [mo for (u, _), mo in mos.items() if u == unit]
        for k, mtype in sorted(types.items()):
            interval = _minutes(mtype.interval_hr)
            hosts = [mo for mo in unit_mos if k in assigned.get((unit, mo.index), ())]
            first_limit = interval + _minutes(ages.get((unit, k), 0.0))
            if not any(_minutes(mo.start_hr) <= first_limit for mo in hosts):
                problems.append(f"unit {unit}, type {k}: no activity within {first_limit} min of the start")
            for mo in hosts:
                end = _minutes(mo.end_hr)
                if end + interval > horizon:
                    continue
                if not any(end < _minutes(p.start_hr) <= end + interval for p in hosts):
                    problems.append(
                        f"unit {unit}, type {k}: no activity within {interval} min after MO {mo.index}"
                    )

    # cuts
    for cut in cuts:
        if all(k in assigned.get((unit, j), ()) for unit, j, ks in cut.members for k in ks):
            members = sorted((unit, j) for unit, j, _ in cut.members)
            problems.append(f"cut over {members} is violated")

    # reported objective
    night = sum(len(ks) for key, ks in assigned.items() if not daytime(mos[key]))
    total = sum(len(ks) for ks in assigned.values())
    if (night, total) != (solution.night_count, solution.total_count):
        problems.append(
            f"reported counts {(solution.night_count, solution.total_count)} differ from {(night, total)}"
        )
    return problems
