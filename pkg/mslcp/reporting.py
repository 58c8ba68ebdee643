"""
Run artifacts: convergence log, schedules, text Gantt charts and the run summary
"""

import logging
from dataclasses import asdict
from pathlib import Path
from typing import List, Optional, Sequence, Union

import pandas as pd
from tabulate import tabulate

from mslcp import config
from mslcp.solver.cuts import CutStrategy
from mslcp.solver.exceptions import SolverError
from mslcp.solver.lbbd import count_violations, required_teams_histogram
from mslcp.solver.models import (
    Instance,
    IterationRecord,
    Job,
    RunResult,
    ShiftSchedule,
    ShiftScope,
)
from mslcp.solver.schemas import (
    ErrorRecord,
    PhaseTotals,
    ScheduleDocument,
    ScheduledJobSchema,
    ShiftScheduleSchema,
    SummaryDocument,
)

logger = logging.getLogger(__name__)

LOG_COLUMNS = [
    "format_version",
    "iteration",
    "master_objective",
    "night_count",
    "total_count",
    "violated_shifts",
    "cuts_added",
    "cumulative_cuts",
    "time_master_s",
    "time_app_s",
    "time_cutgen_s",
    "time_other_s",
    "elapsed_s",
    "app_calls",
]

TIME_COLUMNS = ["time_master_s", "time_app_s", "time_cutgen_s", "time_other_s", "elapsed_s"]


class ConvergenceLog:
    """CSV with one row per iteration, appended as iterations finish."""

    def __init__(self, path: Union[str, Path]):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        if self.path.exists():
            self.path.unlink()

    def append(self, record: IterationRecord) -> None:
        row = {"format_version": config.FORMAT_VERSION, **asdict(record)}
        for column in TIME_COLUMNS:
            row[column] = round(row[column], 3)
        frame = pd.DataFrame([row], columns=LOG_COLUMNS)
        frame.to_csv(
            self.path,
            mode="a",
            header=not self.path.exists(),
            index=False,
            encoding="utf-8",
            lineterminator="\n",
        )


def read_log(path: Union[str, Path]) -> pd.DataFrame:
    return pd.read_csv(path, dtype={"format_version": str})


def clock(minute: int) -> str:
    day, rest = divmod(minute, 24 * 60)
    return f"d{day} {rest // 60:02d}:{rest % 60:02d}"


def render_gantt(
    jobs: Sequence[Job],
    schedule: ShiftSchedule,
    inst: Optional[Instance] = None,
    minutes_per_char: int = config.GANTT_MINUTES_PER_CHAR,
) -> str:
    """
    One line per job: id, team, scheduled interval, MO window and a bar where each character
    is a block of minutes. '#' is worked, '-' lies inside the job window, '~' inside the MO
    but outside the shift, '.' outside both. Without an instance the MO window is the job window.
    """
    if not jobs:
        return ""
    windows = {j.id: (j.release_min, j.deadline_min) for j in jobs}
    if inst is not None:
        for job in jobs:
            mo = inst.opportunity(job.unit, job.mo_index)
            windows[job.id] = (mo.start_min, mo.end_min)
    origin = min(min(j.release_min, windows[j.id][0]) for j in jobs) // minutes_per_char * minutes_per_char
    horizon = max(max(j.deadline_min, windows[j.id][1]) for j in jobs)
    width = -(-(horizon - origin) // minutes_per_char)
    placed = {entry.job_id: (team, entry) for team, entry in schedule.entries()}

    rows = []
    for job in sorted(jobs, key=lambda j: (placed[j.id][1].start_min, j.id)):
        team, entry = placed[job.id]
        mo_start, mo_end = windows[job.id]
        bar = []
        for c in range(width):
            lo = origin + c * minutes_per_char
            hi = lo + minutes_per_char
            if entry.start_min <= lo and hi <= entry.end_min:
                bar.append("#")
            elif job.release_min <= lo and hi <= job.deadline_min:
                bar.append("-")
            elif mo_start <= lo and hi <= mo_end:
                bar.append("~")
            else:
                bar.append(".")
        rows.append([
            job.id,
            f"team {team}",
            f"{clock(entry.start_min)}-{clock(entry.end_min)}",
            f"mo {clock(mo_start)}-{clock(mo_end)}",
            "".join(bar),
        ])
    return tabulate(rows, tablefmt="plain", disable_numparse=True) + "\n"


def schedule_document(result: RunResult, scope: ShiftScope) -> ScheduleDocument:
    shifts = []
    for shift, schedule in result.schedules.items():
        jobs = {j.id: j for j in result.jobs[shift]}
        entries = []
        for team, entry in schedule.entries():
            job = jobs[entry.job_id]
            entries.append(ScheduledJobSchema(
                job_id=job.id,
                unit=job.unit,
                mo_index=job.mo_index,
                types=sorted(job.types),
                team=team,
                start_min=entry.start_min,
                end_min=entry.end_min,
                release_min=job.release_min,
                deadline_min=job.deadline_min,
            ))
        shifts.append(ShiftScheduleSchema(
            location=shift.location,
            window=shift.window.value,
            reference_day=shift.reference_day,
            in_scope=scope.contains(shift),
            teams_used=schedule.teams_used,
            jobs=entries,
        ))
    return ScheduleDocument(shifts=shifts)


def _write_json(model, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(model.model_dump_json(indent=2) + "\n", encoding="utf-8", newline="\n")
    return path


def write_schedules(
    result: RunResult, scope: ShiftScope, out_dir: Union[str, Path], inst: Optional[Instance] = None
) -> List[Path]:
    out_dir = Path(out_dir)
    written = [_write_json(schedule_document(result, scope), out_dir / "schedules.json")]
    gantt_dir = out_dir / "gantt"
    gantt_dir.mkdir(parents=True, exist_ok=True)
    for shift, schedule in result.schedules.items():
        path = gantt_dir / f"{shift.label}.txt"
        path.write_text(render_gantt(result.jobs[shift], schedule, inst), encoding="utf-8", newline="\n")
        written.append(path)
    logger.debug(f"Wrote {len(written)} schedule files to {out_dir}")
    return written


def _phase_totals(history: Sequence[IterationRecord], divisor: int = 1) -> PhaseTotals:
    divisor = max(divisor, 1)
    master = sum(r.time_master_s for r in history) / divisor
    app = sum(r.time_app_s for r in history) / divisor
    cutgen = sum(r.time_cutgen_s for r in history) / divisor
    other = sum(r.time_other_s for r in history) / divisor
    return PhaseTotals(
        master_s=round(master, 3),
        app_s=round(app, 3),
        cutgen_s=round(cutgen, 3),
        other_s=round(other, 3),
        total_s=round(master + app + cutgen + other, 3),
    )


def build_summary(result: RunResult, inst: Instance, strategy: CutStrategy, scope: ShiftScope) -> SummaryDocument:
    history = result.history
    initial = history[0].violated_shifts if history else 0
    quarter: Optional[IterationRecord] = None
    if initial > 0:
        quarter = next((r for r in history if r.violated_shifts <= initial / 4), None)
    solution = result.final_solution
    return SummaryDocument(
        status=result.status.value,
        strategy=strategy.label,
        iterations=result.iterations,
        objective=solution.objective,
        night_count=solution.night_count,
        total_count=solution.total_count,
        initial_violations=initial,
        final_violations=count_violations(solution, inst, scope),
        cumulative_cuts=len(result.cuts),
        quarter_violations_iteration=quarter.iteration if quarter else None,
        quarter_violations_elapsed_s=round(quarter.elapsed_s, 3) if quarter else None,
        required_teams_histogram=required_teams_histogram(solution, inst, scope),
        phase_totals=_phase_totals(history),
        phase_means_per_iteration=_phase_totals(history, len(history)),
    )


def write_summary(summary: SummaryDocument, path: Union[str, Path]) -> Path:
    return _write_json(summary, Path(path))


def write_error(error: SolverError, path: Union[str, Path]) -> Path:
    record = error.to_record()
    return _write_json(ErrorRecord(**record), Path(path))
