"""
Cut generation for shifts whose jobs need more teams than available
"""

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .exceptions import ContractViolationError, ScenarioError
from .models import CutConstraint, CutStrategyKind, Job
from .rapp import solve_rapp
from .scheduler import AppOracle

logger = logging.getLogger(__name__)

Observer = Callable[[Tuple[Job, ...], Tuple[Job, ...]], None]


@dataclass(frozen=True)
class CutStrategy:
    kind: CutStrategyKind
    cuts_per_call: int = 1
    rng_seed: int = 0
    # used when the flow relaxation cannot produce a cut
    fallback_kind: CutStrategyKind = CutStrategyKind.BINARY_SEARCH_HEURISTIC
    fallback_cuts: int = 1

    def __post_init__(self) -> None:
        if self.cuts_per_call < 1:
            raise ValueError(f"cuts_per_call must be positive, got {self.cuts_per_call}")
        if self.fallback_kind is CutStrategyKind.MIN_CUT:
            raise ValueError("the fallback cannot itself be the min-cut procedure")

    @property
    def label(self) -> str:
        if self.kind in (CutStrategyKind.BASIC_HEURISTIC, CutStrategyKind.BINARY_SEARCH_HEURISTIC):
            return f"{self.kind.value}:{self.cuts_per_call}"
        return self.kind.value

    def fallback(self) -> "CutStrategy":
        return CutStrategy(self.fallback_kind, self.fallback_cuts, self.rng_seed)


def parse_strategy(text: str, seed: int = 0) -> CutStrategy:
    """'naive', 'mincut', 'basic:K' or 'binary:K'; a bare heuristic name means K = 1."""
    name, _, count = text.strip().lower().partition(":")
    try:
        kind = CutStrategyKind(name)
    except ValueError:
        raise ScenarioError(f"Unknown cut strategy {text!r}",
                            choices=[k.value for k in CutStrategyKind])
    if count and kind in (CutStrategyKind.NAIVE, CutStrategyKind.MIN_CUT):
        raise ScenarioError(f"Strategy {name!r} takes no cut count")
    try:
        cuts = int(count) if count else 1
        return CutStrategy(kind, cuts, seed)
    except ValueError:
        raise ScenarioError(f"Invalid cut count in {text!r}")


@dataclass(frozen=True)
class MinCutOutcome:
    cuts: Tuple[CutConstraint, ...] = ()
    fallback_required: bool = False


def _ordered(jobs: Iterable[Job]) -> List[Job]:
    return sorted(jobs, key=lambda j: j.id)


def naive(jobs: Iterable[Job]) -> List[CutConstraint]:
    return [CutConstraint.from_jobs(jobs)]


def basic_heuristic(
    jobs: Sequence[Job],
    oracle: AppOracle,
    seed: int,
    observer: Optional[Observer] = None,
) -> CutConstraint:
    """
    Add random jobs one at a time until the chosen set no longer fits. The observer sees
    the jobs chosen before each addition and the added job.
    """
    rng = np.random.default_rng(seed)
    pool = _ordered(jobs)
    chosen: List[Job] = []
    while pool:
        added = pool.pop(int(rng.integers(len(pool))))
        if observer is not None:
            observer(tuple(chosen), (added,))
        chosen.append(added)
        if not oracle(chosen):
            return CutConstraint.from_jobs(chosen)
    raise ContractViolationError("basic heuristic ran out of jobs: the job set fits", jobs=len(chosen))


def binary_search_heuristic(
    jobs: Sequence[Job],
    oracle: AppOracle,
    seed: int,
    observer: Optional[Observer] = None,
) -> CutConstraint:
    """
    Keep A feasible and A + B infeasible. Each round moves a random half of B either into
    A (when A plus that half still fits) or makes it the new B, until B holds one job.
    """
    rng = np.random.default_rng(seed)
    kept: List[Job] = []
    candidates = _ordered(jobs)
    if observer is not None:
        observer(tuple(kept), tuple(candidates))
    while len(candidates) > 1:
        h = math.ceil(len(candidates) / 2)
        picked = set(rng.choice(len(candidates), size=h, replace=False).tolist())
        left = [job for i, job in enumerate(candidates) if i in picked]
        right = [job for i, job in enumerate(candidates) if i not in picked]
        if not oracle(kept + left):
            candidates = left
        else:
            kept = kept + left
            candidates = right
        if observer is not None:
            observer(tuple(kept), tuple(candidates))
    return CutConstraint.from_jobs(kept + candidates)


def min_cut(jobs: Sequence[Job], max_teams: int = 1, dump_dir: Optional[Union[str, Path]] = None) -> MinCutOutcome:
    certificate = solve_rapp(jobs, max_teams, dump_dir=dump_dir)
    if certificate.feasible:
        return MinCutOutcome(fallback_required=True)
    return MinCutOutcome(cuts=certificate.cuts)


def _dedupe(cuts: Iterable[CutConstraint]) -> List[CutConstraint]:
    seen = set()
    unique = []
    for cut in cuts:
        if cut not in seen:
            seen.add(cut)
            unique.append(cut)
    return unique


def generate(
    strategy: CutStrategy,
    jobs: Sequence[Job],
    oracle: AppOracle,
    seed: Optional[int] = None,
    dump_dir: Optional[Union[str, Path]] = None,
) -> List[CutConstraint]:
    """Cuts for an infeasible job set; each cut is itself infeasible."""
    jobs = _ordered(jobs)
    if not jobs or oracle(jobs):
        raise ContractViolationError("cut generation called on a job set that fits",
                                     jobs=[j.id for j in jobs], max_teams=oracle.max_teams)
    base = strategy.rng_seed if seed is None else seed
    kind = strategy.kind

    if kind is CutStrategyKind.NAIVE:
        cuts = naive(jobs)
    elif kind is CutStrategyKind.BASIC_HEURISTIC:
        cuts = [basic_heuristic(jobs, oracle, base + i) for i in range(strategy.cuts_per_call)]
    elif kind is CutStrategyKind.BINARY_SEARCH_HEURISTIC:
        cuts = [binary_search_heuristic(jobs, oracle, base + i) for i in range(strategy.cuts_per_call)]
    else:
        outcome = min_cut(jobs, oracle.max_teams, dump_dir=dump_dir)
        if outcome.fallback_required:
            fallback = strategy.fallback()
            logger.warning(f"Flow relaxation fits {len(jobs)} jobs that need more teams; "
                           f"falling back to {fallback.label}")
            return generate(fallback, jobs, oracle, base)
        cuts = list(outcome.cuts)

    cuts = _dedupe(cuts)
    logger.debug(f"{strategy.label}: {len(cuts)} cuts, sizes {[len(c) for c in cuts]}")
    return cuts
