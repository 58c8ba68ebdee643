"""
Solver errors
"""

from typing import Any, Dict, Optional


class SolverError(Exception):
    """Base error: a stable machine code plus a human readable detail."""

    code = "solver_error"

    def __init__(self, detail: str, **context: Any):
        super().__init__(detail)
        self.detail = detail
        self.context = context

    def to_record(self) -> Dict[str, Any]:
        record = {"code": self.code, "detail": self.detail}
        if self.context:
            record["context"] = {k: _plain(v) for k, v in self.context.items()}
        return record


def _plain(value: Any) -> Any:
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    if isinstance(value, (list, tuple, set, frozenset)):
        return [_plain(v) for v in value]
    return str(value)


class InstanceError(SolverError):
    code = "instance_error"


class ContractViolationError(SolverError):
    code = "contract_violation"


class InternalError(SolverError):
    code = "internal_error"


class UnsupportedError(SolverError):
    code = "unsupported"


class GenerationError(SolverError):
    code = "generation_error"


class ScenarioError(SolverError):
    code = "scenario_error"


class MasterInfeasibleError(SolverError):
    code = "master_infeasible"


class MasterTimeoutError(SolverError):
    """Time budget ran out; carries the best incumbent (may be None) and a lower bound."""

    code = "time_budget_exceeded"

    def __init__(self, detail: str, incumbent: Optional[Any] = None, lower_bound: float = 0.0):
        super().__init__(detail, lower_bound=lower_bound)
        self.incumbent = incumbent
        self.lower_bound = lower_bound
