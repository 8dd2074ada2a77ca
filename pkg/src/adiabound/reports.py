"""Pass/fail records produced by the numerical checks."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DEFAULT_SLACK_TOL = -1e-9


@dataclass(frozen=True)
class CheckReport:
    """Outcome of one inequality or identity check.

    ``min_slack`` is the smallest value of (right side - left side) seen; the
    check passes when it is at least ``tolerance``.
    """

    name: str
    min_slack: float
    tolerance: float = DEFAULT_SLACK_TOL
    worst_at: float | None = None
    detail: dict = field(default_factory=dict, compare=False)

    @property
    def passed(self) -> bool:
        return self.min_slack >= self.tolerance

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{self.name},{self.min_slack + 0.0:.17g},{status}"


def slack_report(name, rhs, lhs, grid=None, tolerance=DEFAULT_SLACK_TOL, **detail) -> CheckReport:
    slack = np.atleast_1d(np.asarray(rhs, dtype=float) - np.asarray(lhs, dtype=float))
    i = int(np.argmin(slack))
    where = None
    if grid is not None:
        grid = np.atleast_1d(np.asarray(grid, dtype=float))
        where = float(grid[i])
        # lam = 0 is tight by construction; the interior minimum is the informative one
        interior = slack[grid > 0]
        if interior.size:
            detail.setdefault("interior_min", float(interior.min()))
    return CheckReport(name, float(slack[i]), tolerance, where, detail)
