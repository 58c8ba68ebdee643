"""
Scenario runs: one strategy on one instance, or several strategies side by side
"""

import enum
import logging
from pathlib import Path
from typing import List, Optional, Sequence

import pandas as pd
from pydantic import BaseModel, Field, ValidationError, model_validator

from mslcp import config, reporting
from mslcp.generator import GeneratorSpec, generate_instance
from mslcp.solver import lbbd
from mslcp.solver.cuts import parse_strategy
from mslcp.solver.exceptions import InstanceError, InternalError, ScenarioError, SolverError
from mslcp.solver.instance import load_instance, save_instance, validate
from mslcp.solver.models import Instance, ScopeKind, ShiftScope
from mslcp.solver.schemas import SummaryDocument
from mslcp.solver.shifts import all_shifts

logger = logging.getLogger(__name__)

DEFAULT_VARIANTS = ("naive", "basic:1", "binary:15", "mincut")
EXIT_OK = 0
EXIT_SOLVER_ERROR = 1
EXIT_INPUT_ERROR = 2


class ScenarioKind(str, enum.Enum):
    SINGLE_SHIFT = "single_shift"
    ALL_SHIFTS = "all_shifts"


class ScenarioConfig(BaseModel):
    instance_path: Optional[Path] = None
    generator: Optional[GeneratorSpec] = None
    scenario: ScenarioKind = ScenarioKind.ALL_SHIFTS
    # shift label such as "L1-day-d3"; required for single-shift runs
    target_shift: Optional[str] = None
    strategy: str = "mincut"
    time_limit_s: float = Field(default=config.DEFAULT_TIME_LIMIT_S, gt=0)
    max_iterations: Optional[int] = Field(default=None, ge=1)
    seed: int = config.DEFAULT_SEED
    include_night: bool = False
    verify: bool = True
    output_dir: Path
    dump_graphs: Optional[Path] = None

    @model_validator(mode="after")
    def check_source(self) -> "ScenarioConfig":
        if (self.instance_path is None) == (self.generator is None):
            raise ValueError("exactly one of instance_path and generator is required")
        if self.scenario is ScenarioKind.SINGLE_SHIFT and not self.target_shift:
            raise ValueError("single-shift scenarios need a target shift")
        return self


def parse_duration(text: str) -> float:
    """Seconds in '90', '90s', '15m', '2h' or any other pandas Timedelta string."""
    text = str(text).strip()
    try:
        seconds = float(text)
    except ValueError:
        try:
            seconds = pd.Timedelta(text).total_seconds()
        except ValueError:
            raise ScenarioError(f"Cannot read duration {text!r}")
    if seconds <= 0:
        raise ScenarioError(f"Duration {text!r} is not positive")
    return seconds


def load_scenario_instance(cfg: ScenarioConfig) -> Instance:
    inst = load_instance(cfg.instance_path) if cfg.instance_path else generate_instance(cfg.generator)
    problems = validate(inst)
    if problems:
        raise InstanceError(f"Instance has {len(problems)} problems: {problems[0]}", problems=problems)
    return inst


def scenario_scope(cfg: ScenarioConfig, inst: Instance) -> ShiftScope:
    if cfg.scenario is ScenarioKind.ALL_SHIFTS:
        return ShiftScope(ScopeKind.ALL_SHIFTS if cfg.include_night else ScopeKind.ALL_DAY_SHIFTS)
    by_label = {shift.label: shift for shift in all_shifts(inst)}
    if cfg.target_shift not in by_label:
        raise ScenarioError(f"Shift {cfg.target_shift!r} does not occur in the instance",
                            known=sorted(by_label))
    return ShiftScope.selected([by_label[cfg.target_shift]])


def run_scenario(cfg: ScenarioConfig) -> int:
    """Run one scenario and write its artifacts; returns a process exit status."""
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    error_path = out / "error.json"
    if error_path.exists():
        error_path.unlink()

    try:
        inst = load_scenario_instance(cfg)
        if cfg.generator is not None:
            save_instance(inst, out / "instance.json", name=f"generated-{cfg.generator.seed}")
        scope = scenario_scope(cfg, inst)
        strategy = parse_strategy(cfg.strategy, seed=cfg.seed)
        settings = config.RunSettings(
            time_limit_s=cfg.time_limit_s,
            max_iterations=cfg.max_iterations,
            include_night=cfg.include_night,
            verify=cfg.verify,
        )
        logger.info(f"Scenario {cfg.scenario.value} with {strategy.label} into {out}")
        log = reporting.ConvergenceLog(out / "convergence.csv")
        result = lbbd.run(inst, strategy, scope, settings, on_iteration=log.append, dump_dir=cfg.dump_graphs)
        reporting.write_schedules(result, scope, out, inst)
        summary = reporting.build_summary(result, inst, strategy, scope)
        reporting.write_summary(summary, out / "summary.json")
        logger.info(f"Scenario finished: {summary.status}, objective {summary.objective:.3f}, "
                    f"{summary.iterations} iterations")
        return EXIT_OK
    except (InstanceError, ScenarioError) as e:
        logger.error(f"Scenario input rejected: {e.detail}")
        reporting.write_error(e, error_path)
        return EXIT_INPUT_ERROR
    except SolverError as e:
        logger.error(f"Scenario failed: {e.detail}", exc_info=True)
        reporting.write_error(e, error_path)
        return EXIT_SOLVER_ERROR
    except Exception as e:
        logger.error(f"Unexpected error in scenario: {e}", exc_info=True)
        reporting.write_error(InternalError(str(e)), error_path)
        return EXIT_SOLVER_ERROR


def _variant_dir(variant: str) -> str:
    return variant.replace(":", "-")


def compare_strategies(cfg: ScenarioConfig, variants: Sequence[str] = DEFAULT_VARIANTS) -> pd.DataFrame:
    """Run the scenario once per variant, each into its own subdirectory, and tabulate the outcomes."""
    rows: List[dict] = []
    for variant in variants:
        sub = cfg.model_copy(update={"strategy": variant, "output_dir": Path(cfg.output_dir) / _variant_dir(variant)})
        code = run_scenario(sub)
        row = {"strategy": variant, "exit_code": code}
        summary_path = sub.output_dir / "summary.json"
        if code == EXIT_OK and summary_path.exists():
            summary = SummaryDocument.model_validate_json(summary_path.read_text(encoding="utf-8"))
            row.update({
                "status": summary.status,
                "iterations": summary.iterations,
                "objective": summary.objective,
                "night_count": summary.night_count,
                "total_count": summary.total_count,
                "initial_violations": summary.initial_violations,
                "final_violations": summary.final_violations,
                "cumulative_cuts": summary.cumulative_cuts,
                "quarter_violations_elapsed_s": summary.quarter_violations_elapsed_s,
                "total_s": summary.phase_totals.total_s,
                "mean_iteration_s": summary.phase_means_per_iteration.total_s,
            })
        rows.append(row)
    table = pd.DataFrame(rows)
    Path(cfg.output_dir).mkdir(parents=True, exist_ok=True)
    table.to_csv(Path(cfg.output_dir) / "comparison.csv", index=False, encoding="utf-8", lineterminator="\n")
    return table


def build_config(**fields) -> ScenarioConfig:
    """ScenarioConfig from loose values; validation problems become a ScenarioError."""
    try:
        return ScenarioConfig(**fields)
    except ValidationError as e:
        raise ScenarioError(f"Invalid scenario: {e.errors()[0]['msg']}",
                            errors=[err["msg"] for err in e.errors()])
