"""
Shipped fixtures
"""

from pathlib import Path
from typing import Tuple

from mslcp.generator import GeneratorSpec, generate_instance
from mslcp.solver.instance import load_instance
from mslcp.solver.models import Instance, Job, ShiftKey, ShiftWindow

FIXTURE_DIR = Path(__file__).parent
ZL_13_04_PATH = FIXTURE_DIR / "zl_13_04.json"
ZL_DAY_SHIFT = ShiftKey("Zl", ShiftWindow.DAY, 0)


def fig3_jobs() -> Tuple[Job, ...]:
    """Four jobs of two minutes; q1 and q2 share minutes 0-1, q3 and q4 share minutes 2-3."""
    return (
        Job("q1", 1, frozenset({1}), 0, 2, 2),
        Job("q2", 1, frozenset({1}), 0, 2, 2),
        Job("q3", 1, frozenset({1}), 2, 4, 2),
        Job("q4", 1, frozenset({1}), 2, 4, 2),
    )


def zl_13_04() -> Instance:
    """Five units at Zl on one morning; unit 2404 only has a 45 minute daytime stop."""
    return load_instance(ZL_13_04_PATH)


def zl_13_04_jobs() -> Tuple[Job, ...]:
    """The Zl day shift when every activity that fits is done there."""
    both = frozenset({1, 2})
    return (
        Job("2404", 1, frozenset({1}), 600, 645, 30, ZL_DAY_SHIFT),
        Job("2411", 1, both, 480, 570, 90, ZL_DAY_SHIFT),
        Job("2412", 1, both, 570, 670, 90, ZL_DAY_SHIFT),
        Job("2413", 1, both, 670, 760, 90, ZL_DAY_SHIFT),
        Job("2415", 1, both, 780, 960, 90, ZL_DAY_SHIFT),
    )


def toy3_spec() -> GeneratorSpec:
    return GeneratorSpec(units=3, locations=2, days=2, pressure=0.5, seed=7)


def toy3() -> Instance:
    """Three units, two locations, two days, one engineered day-shift conflict."""
    return generate_instance(toy3_spec())


def ns_like_spec() -> GeneratorSpec:
    return GeneratorSpec(units=20, locations=4, days=7, pressure=0.5, seed=11)
