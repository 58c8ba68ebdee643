"""
Solver configuration
"""

from typing import Optional

from pydantic import BaseModel, Field

# Policy defaults
DEFAULT_DAY_START = 7.0
DEFAULT_NIGHT_START = 19.0
DEFAULT_MAX_DAY_LOCATIONS = 5
DEFAULT_TEAMS_PER_SHIFT = 1
DEFAULT_EPSILON = 0.001
DEFAULT_HORIZON_DAYS = 7

# (id, duration in minutes, interval in hours)
DEFAULT_TYPES = ((1, 30, 24.0), (2, 60, 48.0))

# Run defaults
DEFAULT_TIME_LIMIT_S = 2 * 60 * 60
DEFAULT_SEED = 0

# Output formats
FORMAT_VERSION = "1"
GANTT_MINUTES_PER_CHAR = 5


class RunSettings(BaseModel):
    """Options for one decomposition run; nothing here is read from the environment."""

    time_limit_s: float = Field(default=DEFAULT_TIME_LIMIT_S, gt=0)
    max_iterations: Optional[int] = Field(default=None, ge=1)
    include_night: bool = False
    verify: bool = True
    master_time_budget_s: Optional[float] = Field(default=None, gt=0)
