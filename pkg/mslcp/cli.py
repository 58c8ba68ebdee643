"""
Command line interface
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from mslcp import __version__, config
from mslcp.generator import GeneratorSpec, generate_instance
from mslcp.scenario import (
    DEFAULT_VARIANTS,
    EXIT_INPUT_ERROR,
    EXIT_OK,
    EXIT_SOLVER_ERROR,
    ScenarioKind,
    build_config,
    compare_strategies,
    parse_duration,
    run_scenario,
)
from mslcp.solver.exceptions import SolverError
from mslcp.solver.instance import load_instance, save_instance, validate

logger = logging.getLogger(__name__)


def _add_run_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--instance", type=Path, required=True, help="instance JSON file")
    parser.add_argument("--output", "-o", type=Path, required=True, help="output directory")
    parser.add_argument("--seed", type=int, default=config.DEFAULT_SEED)
    parser.add_argument("--time-limit", default=str(config.DEFAULT_TIME_LIMIT_S),
                        help="wall time limit, e.g. 900, 15m, 2h")
    parser.add_argument("--max-iterations", type=int, default=None)
    parser.add_argument("--shift", default=None,
                        help="single-shift scenario: label of the only shift whose capacity is checked")
    parser.add_argument("--include-night", action="store_true", help="check night shift capacity too")
    parser.add_argument("--no-verify", action="store_true", help="skip the independent master solution check")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mslcp", description="Maintenance scheduling and location choice solver")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default="INFO", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a synthetic instance")
    gen.add_argument("--units", type=int, required=True)
    gen.add_argument("--locations", type=int, required=True)
    gen.add_argument("--days", type=int, default=config.DEFAULT_HORIZON_DAYS)
    gen.add_argument("--pressure", type=float, default=0.25)
    gen.add_argument("--density", type=float, default=1.0, help="chance of a daytime MO per unit and day")
    gen.add_argument("--max-day-locations", type=int, default=config.DEFAULT_MAX_DAY_LOCATIONS)
    gen.add_argument("--seed", type=int, default=config.DEFAULT_SEED)
    gen.add_argument("--output", "-o", type=Path, required=True, help="instance JSON file to write")

    solve = sub.add_parser("solve", help="run one cut strategy")
    _add_run_options(solve)
    solve.add_argument("--strategy", default="mincut", help="naive, mincut, basic:K or binary:K")
    solve.add_argument("--dump-graphs", type=Path, default=None, help="write flow graphs as GraphML here")

    compare = sub.add_parser("compare", help="run several cut strategies on the same instance")
    _add_run_options(compare)
    compare.add_argument("--variants", nargs="+", default=list(DEFAULT_VARIANTS))

    check = sub.add_parser("validate", help="check an instance file")
    check.add_argument("--instance", type=Path, required=True)
    return parser


def _scenario_fields(args: argparse.Namespace) -> dict:
    return dict(
        instance_path=args.instance,
        scenario=ScenarioKind.SINGLE_SHIFT if args.shift else ScenarioKind.ALL_SHIFTS,
        target_shift=args.shift,
        time_limit_s=parse_duration(args.time_limit),
        max_iterations=args.max_iterations,
        seed=args.seed,
        include_night=args.include_night,
        verify=not args.no_verify,
        output_dir=args.output,
    )


def _generate(args: argparse.Namespace) -> int:
    spec = GeneratorSpec(
        units=args.units,
        locations=args.locations,
        days=args.days,
        pressure=args.pressure,
        day_mo_density=args.density,
        max_day_locations=args.max_day_locations,
        seed=args.seed,
    )
    inst = generate_instance(spec)
    save_instance(inst, args.output, name=f"generated-{args.seed}")
    logger.info(f"Wrote {args.output}: {len(inst.units)} units, {len(inst.opportunities)} MOs")
    return EXIT_OK


def _validate(args: argparse.Namespace) -> int:
    inst = load_instance(args.instance)
    problems = validate(inst)
    for problem in problems:
        print(problem)
    if problems:
        return EXIT_INPUT_ERROR
    print(f"{args.instance}: ok ({len(inst.units)} units, {len(inst.opportunities)} MOs)")
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.getLogger().setLevel(args.log_level)
    try:
        if args.command == "generate":
            return _generate(args)
        if args.command == "validate":
            return _validate(args)
        if args.command == "solve":
            cfg = build_config(strategy=args.strategy, dump_graphs=args.dump_graphs, **_scenario_fields(args))
            return run_scenario(cfg)
        cfg = build_config(**_scenario_fields(args))
        table = compare_strategies(cfg, args.variants)
        print(table.to_string(index=False))
        return EXIT_OK if (table["exit_code"] == EXIT_OK).all() else EXIT_SOLVER_ERROR
    except SolverError as e:
        logger.error(f"{e.code}: {e.detail}")
        return EXIT_INPUT_ERROR
    except ValidationError as e:
        logger.error(f"Invalid arguments: {e.errors()[0]['msg']}")
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
