"""
Master problem: location opening and assignment of maintenance activities to MOs

Exact search. Given the set of open daytime locations the problem separates by unit
except for the capacity cuts, so each unit is solved to optimality by a dynamic program
over its MOs in start order, and cuts are enforced by branching: a violated cut with
activities a1..am spawns children "a1 dropped", "a1 kept, a2 dropped", ...

A node's bound is the sum of the unit optima under its fixings plus, for violated cuts
over pairwise disjoint units, the cheapest drop in each. Children are evaluated when
created and the open nodes are searched best bound first, deepest first on ties.
"""

import heapq
import itertools
import logging
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .exceptions import MasterInfeasibleError, MasterTimeoutError
from .instance import is_daytime
from .models import CutConstraint, Instance, MasterSolution, to_minutes

logger = logging.getLogger(__name__)

Activity = Tuple[str, int, int]
Fixings = Dict[Activity, int]
# per type: (earliest pending deadline, obligations that open later)
_TypeState = Tuple[Optional[int], Tuple[Tuple[int, int], ...]]


@dataclass(frozen=True)
class _Slot:
    index: int
    location: str
    start: int
    end: int
    day: bool
    # type subsets that fit the MO, in tie-break order
    options: Tuple[FrozenSet[int], ...]


@dataclass(frozen=True)
class _UnitPlan:
    night: int
    total: int
    picks: FrozenSet[Tuple[int, int]]


class _UnitModel:
    """One unit's assignment problem for a fixed set of usable MOs."""

    def __init__(self, inst: Instance, unit: str, epsilon: Fraction):
        self.unit = unit
        self.epsilon = epsilon
        self.horizon = inst.horizon_min
        self.type_ids = inst.type_ids
        self.durations = {k: inst.maintenance_type(k).duration_min for k in self.type_ids}
        self.intervals = {k: inst.maintenance_type(k).interval_min for k in self.type_ids}
        self.first_deadline = {
            k: self.intervals[k] + to_minutes(inst.initial_age(unit, k)) for k in self.type_ids
        }
        slots = []
        for mo in inst.unit_opportunities(unit):
            day = is_daytime(mo, inst)
            fitting = [
                frozenset(combo)
                for size in range(len(self.type_ids) + 1)
                for combo in itertools.combinations(self.type_ids, size)
                if sum(self.durations[k] for k in combo) <= mo.length_min
            ]
            # assign first at day MOs, skip first at night MOs
            fitting.sort(key=lambda c: (-len(c) if day else len(c), sorted(c)))
            slots.append(_Slot(mo.index, mo.location, mo.start_min, mo.end_min, day, tuple(fitting)))
        self.slots = tuple(sorted(slots, key=lambda s: (s.start, s.index)))

    def _key(self, night: int, total: int) -> Fraction:
        return night + self.epsilon * total

    def solve(
        self,
        usable: FrozenSet[int],
        forced_on: FrozenSet[Tuple[int, int]],
        forced_off: FrozenSet[Tuple[int, int]],
    ) -> Optional[_UnitPlan]:
        slots = self.slots
        options = []
        for slot in slots:
            on = {k for (j, k) in forced_on if j == slot.index}
            off = {k for (j, k) in forced_off if j == slot.index}
            if slot.index not in usable:
                choices = [frozenset()] if not on else []
            else:
                choices = [c for c in slot.options if on <= c and not (c & off)]
            options.append(choices)

        memo: Dict[Tuple[int, Tuple[_TypeState, ...]], Optional[Tuple[int, int, Tuple]]] = {}

        def best(pos: int, state: Tuple[_TypeState, ...]) -> Optional[Tuple[int, int, Tuple]]:
            if pos == len(slots):
                if all(active is None and not future for active, future in state):
                    return (0, 0, ())
                return None

            slot = slots[pos]
            normalized = []
            for active, future in state:
                waiting = []
                for lo, hi in future:
                    if lo < slot.start:
                        active = hi if active is None else min(active, hi)
                    else:
                        waiting.append((lo, hi))
                if active is not None and active < slot.start:
                    return None
                normalized.append((active, tuple(sorted(waiting))))
            key = (pos, tuple(normalized))
            if key in memo:
                return memo[key]

            result = None
            result_key = None
            for chosen in options[pos]:
                nxt = []
                for k, (active, future) in zip(self.type_ids, normalized):
                    if k in chosen:
                        due = slot.end + self.intervals[k]
                        future = future + ((slot.end, due),) if due <= self.horizon else future
                        nxt.append((None, future))
                    else:
                        nxt.append((active, future))
                tail = best(pos + 1, tuple(nxt))
                if tail is None:
                    continue
                night = tail[0] + (0 if slot.day else len(chosen))
                total = tail[1] + len(chosen)
                candidate_key = self._key(night, total)
                if result is None or candidate_key < result_key:
                    picks = tuple((slot.index, k) for k in sorted(chosen)) + tail[2]
                    result, result_key = (night, total, picks), candidate_key
            memo[key] = result
            return result

        start = tuple((self.first_deadline[k], ()) for k in self.type_ids)
        found = best(0, start)
        if found is None:
            return None
        return _UnitPlan(found[0], found[1], frozenset(found[2]))


@dataclass(frozen=True)
class _Evaluation:
    key: Fraction
    night: int
    total: int
    x: FrozenSet[Activity]
    # objective contribution of each unit
    unit_keys: Dict[str, Fraction] = field(compare=False, hash=False)


@dataclass
class _Node:
    usable: Dict[str, FrozenSet[int]]
    fixings: Fixings
    ev: _Evaluation
    bound: Fraction
    # literals of the cut to branch on; None when every cut holds
    branch_on: Optional[List[Activity]]


_FREE: Tuple[FrozenSet[Tuple[int, int]], FrozenSet[Tuple[int, int]]] = (frozenset(), frozenset())


class MasterProblem:
    """
    Exact solver for the master problem of one instance.

    Unit optima are cached across calls, so re-solving with a growing cut set only
    recomputes the units touched by new fixings.
    """

    def __init__(self, inst: Instance):
        self.inst = inst
        self.epsilon = Fraction(str(inst.epsilon))
        self._units = {u: _UnitModel(inst, u, self.epsilon) for u in inst.units}
        self._cache: Dict[Tuple, Optional[_UnitPlan]] = {}
        self._day_locations = sorted({
            mo.location for mo in inst.opportunities if is_daytime(mo, inst)
        })
        self.nodes_explored = 0

    def day_location_sets(self) -> List[Tuple[str, ...]]:
        """Maximal sets of daytime locations that respect the opening limit."""
        limit = max(self.inst.max_day_locations, 0)
        if len(self._day_locations) <= limit:
            return [tuple(self._day_locations)]
        return list(itertools.combinations(self._day_locations, limit))

    def _usable(self, open_days: Tuple[str, ...]) -> Dict[str, FrozenSet[int]]:
        opened = set(open_days)
        return {
            u: frozenset(s.index for s in model.slots if not s.day or s.location in opened)
            for u, model in self._units.items()
        }

    def _unit_plan(
        self,
        unit: str,
        usable: FrozenSet[int],
        on: FrozenSet[Tuple[int, int]],
        off: FrozenSet[Tuple[int, int]],
    ) -> Optional[_UnitPlan]:
        key = (unit, usable, on, off)
        if key not in self._cache:
            self._cache[key] = self._units[unit].solve(usable, on, off)
        return self._cache[key]

    @staticmethod
    def _by_unit(fixings: Fixings) -> Dict[str, Tuple[FrozenSet[Tuple[int, int]], FrozenSet[Tuple[int, int]]]]:
        on: Dict[str, set] = {}
        off: Dict[str, set] = {}
        for (u, j, k), v in fixings.items():
            (on if v == 1 else off).setdefault(u, set()).add((j, k))
        return {
            u: (frozenset(on.get(u, ())), frozenset(off.get(u, ())))
            for u in set(on) | set(off)
        }

    def _evaluate(self, usable: Dict[str, FrozenSet[int]], split: Dict) -> Optional[_Evaluation]:
        night = total = 0
        x = []
        unit_keys = {}
        for unit in self.inst.units:
            on, off = split.get(unit, _FREE)
            plan = self._unit_plan(unit, usable[unit], on, off)
            if plan is None:
                return None
            night += plan.night
            total += plan.total
            unit_keys[unit] = plan.night + self.epsilon * plan.total
            x.extend((unit, j, k) for j, k in plan.picks)
        return _Evaluation(night + self.epsilon * total, night, total, frozenset(x), unit_keys)

    def _drop_cost(
        self, usable: Dict[str, FrozenSet[int]], split: Dict, ev: _Evaluation, activity: Activity
    ) -> Optional[Fraction]:
        """Increase of the owning unit's optimum when the activity is forbidden; None if it cannot be."""
        unit, j, k = activity
        on, off = split.get(unit, _FREE)
        if (j, k) in on:
            return None
        plan = self._unit_plan(unit, usable[unit], on, off | {(j, k)})
        if plan is None:
            return None
        return plan.night + self.epsilon * plan.total - ev.unit_keys[unit]

    def _node(
        self, usable: Dict[str, FrozenSet[int]], fixings: Fixings, cut_literals: List[List[Activity]]
    ) -> Optional[_Node]:
        split = self._by_unit(fixings)
        ev = self._evaluate(usable, split)
        if ev is None:
            return None
        violated = [literals for literals in cut_literals if all(lit in ev.x for lit in literals)]
        if not violated:
            return _Node(usable, fixings, ev, ev.key, None)

        # every violated cut costs at least its cheapest drop; cuts over disjoint units add up
        priced = []
        for order, literals in enumerate(violated):
            costs = [c for c in (self._drop_cost(usable, split, ev, lit) for lit in literals) if c is not None]
            if not costs:
                return None
            priced.append((min(costs), order, literals))
        priced.sort(key=lambda p: (-p[0], p[1]))
        extra = Fraction(0)
        charged: set = set()
        for cost, _, literals in priced:
            units = {u for u, _, _ in literals}
            if cost > 0 and not units & charged:
                extra += cost
                charged |= units
        return _Node(usable, fixings, ev, ev.key + extra, priced[0][2])

    @staticmethod
    def _branch(literals: List[Activity], fixings: Fixings) -> List[Fixings]:
        children = []
        for t, dropped in enumerate(literals):
            if fixings.get(dropped) == 1:
                continue
            child = dict(fixings)
            child[dropped] = 0
            if any(child.get(kept) == 0 for kept in literals[:t]):
                continue
            child.update({kept: 1 for kept in literals[:t]})
            children.append(child)
        return children

    @staticmethod
    def _propagate(fixings: Fixings, cut_literals: List[List[Activity]]) -> Optional[Fixings]:
        """Forbid the last open activity of any cut whose other activities are all fixed on."""
        changed = True
        while changed:
            changed = False
            for literals in cut_literals:
                open_ = [lit for lit in literals if fixings.get(lit) != 1]
                if not open_:
                    return None
                if len(open_) == 1 and open_[0] not in fixings:
                    fixings[open_[0]] = 0
                    changed = True
        return fixings

    def _solution(self, ev: _Evaluation) -> MasterSolution:
        day = set()
        night = set()
        for unit, j, _ in ev.x:
            mo = self.inst.opportunity(unit, j)
            (day if is_daytime(mo, self.inst) else night).add(mo.location)
        return MasterSolution(
            x=ev.x,
            y_day=frozenset(day),
            y_night=frozenset(night),
            night_count=ev.night,
            total_count=ev.total,
            epsilon=self.inst.epsilon,
        )

    def solve(self, cuts: Iterable[CutConstraint] = (), time_budget: Optional[float] = None) -> MasterSolution:
        """Optimal solution under all cuts; raises on infeasibility or an exhausted time budget."""
        deadline = None if time_budget is None else time.monotonic() + time_budget
        ordered_cuts = sorted(set(cuts), key=CutConstraint.sort_key)
        cut_literals = [cut.literals() for cut in ordered_cuts]

        incumbent: Optional[_Evaluation] = None
        # (bound, -depth, push order, node)
        heap: List[Tuple[Fraction, int, int, _Node]] = []
        counter = itertools.count()
        nodes = 0

        def check_deadline(unexplored: bool) -> None:
            if deadline is None or time.monotonic() <= deadline:
                return
            bounds = []
            if heap:
                bounds.append(heap[0][0])
            if incumbent is not None:
                bounds.append(incumbent.key)
            if unexplored:
                bounds.append(Fraction(0))
            raise MasterTimeoutError(
                f"Master time budget of {time_budget}s exceeded after {nodes} nodes",
                incumbent=self._solution(incumbent) if incumbent else None,
                lower_bound=float(min(bounds)) if bounds else math.inf,
            )

        def consider(node: _Node, depth: int) -> None:
            nonlocal incumbent
            if incumbent is not None and node.bound >= incumbent.key:
                return
            if node.branch_on is None:
                incumbent = node.ev
            else:
                heapq.heappush(heap, (node.bound, -depth, next(counter), node))

        root_fixings = self._propagate({}, cut_literals)
        for open_days in self.day_location_sets():
            check_deadline(unexplored=True)
            if root_fixings is None:
                break
            node = self._node(self._usable(open_days), dict(root_fixings), cut_literals)
            nodes += 1
            if node is not None:
                consider(node, 0)

        while heap:
            check_deadline(unexplored=False)
            bound, neg_depth, _, node = heapq.heappop(heap)
            if incumbent is not None and bound >= incumbent.key:
                break
            for fixings in self._branch(node.branch_on, node.fixings):
                fixings = self._propagate(fixings, cut_literals)
                if fixings is None:
                    continue
                child = self._node(node.usable, fixings, cut_literals)
                nodes += 1
                if child is not None:
                    consider(child, 1 - neg_depth)

        self.nodes_explored = nodes
        if incumbent is None:
            raise MasterInfeasibleError(
                f"No assignment satisfies the master constraints under {len(ordered_cuts)} cuts",
                cut_count=len(ordered_cuts),
                cuts=cut_literals,
            )
        logger.debug(f"Master solved: objective {float(incumbent.key):.6f}, {nodes} nodes, {len(ordered_cuts)} cuts")
        return self._solution(incumbent)

    def lower_bound(self, cuts: Iterable[CutConstraint] = (), time_budget: Optional[float] = None) -> float:
        """Best proven bound: the optimum when the search completes, the open-node bound otherwise."""
        try:
            return self.solve(cuts, time_budget).objective
        except MasterTimeoutError as e:
            return e.lower_bound
        except MasterInfeasibleError:
            return math.inf


def solve(inst: Instance, cuts: Sequence[CutConstraint] = (), time_budget: Optional[float] = None) -> MasterSolution:
    return MasterProblem(inst).solve(cuts, time_budget)


def lower_bound(inst: Instance, cuts: Sequence[CutConstraint] = (), time_budget: Optional[float] = None) -> float:
    return MasterProblem(inst).lower_bound(cuts, time_budget)
