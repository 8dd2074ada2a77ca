"""Adiabaticity breakdown: mean free path and the size-dependent rate bound."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from .bounds import Trace, build_trace
from .errors import DomainError, EpsilonOutOfRange, NoCrossing
from .evolution import IntegratorConfig
from .model import DriveProtocol, ModelParams, c_n, delta_v_closed

E_INV = math.exp(-1.0)
M_IMPROVED = math.exp(-0.5) * math.sqrt(1.0 - E_INV) + math.sqrt(1.0 - E_INV - math.exp(-2.0))
M_OLD = 1.0
DEFAULT_EPSILON = 0.1


def mean_free_path_asymptotic(p: ModelParams) -> float:
    return c_n(p) ** -0.5


def crossing(grid, values, level: float = E_INV, xtol: float = 1e-6) -> float:
    """First ``lam`` where the linear interpolant of ``values`` falls to ``level``."""
    grid = np.asarray(grid, dtype=float)
    values = np.asarray(values, dtype=float)
    below = np.flatnonzero(values <= level)
    if below.size == 0:
        raise NoCrossing(f"trace never reaches {level:.6g} up to lambda={grid[-1]:.6g}")
    i = int(below[0])
    if i == 0:
        return float(grid[0])
    lo, hi = grid[i - 1], grid[i]
    return float(bisect(lambda x: np.interp(x, grid, values) - level, lo, hi, xtol=xtol))


def mean_free_path(p: ModelParams, trace: Trace | None = None,
                   cfg: IntegratorConfig = IntegratorConfig(), points: int = 2048,
                   window: float = 3.0) -> tuple[float, float]:
    """``(asymptotic, numeric)`` solutions of ``F(lam*) = 1/e``.

    Without a trace, the chain is simulated on ``[0, window * C_N^(-1/2)]``.
    """
    asym = mean_free_path_asymptotic(p)
    if trace is None:
        protocol = DriveProtocol.uniform(window * asym, points)
        trace = build_trace(p, protocol, cfg)
    return asym, crossing(trace.lambda_grid, trace.F)


def r_at_mean_free_path(p: ModelParams) -> float:
    """Speed-limit integral at the asymptotic mean free path, ``dV_N / (2 Gamma C_N)``."""
    return delta_v_closed(p) / (2.0 * p.Gamma * c_n(p))


@dataclass
class AdiabaticityReport:
    epsilon: float
    lambda_grid: np.ndarray
    holds: np.ndarray
    margin: np.ndarray

    @property
    def first_violation(self) -> float | None:
        bad = np.flatnonzero(~self.holds)
        return float(self.lambda_grid[bad[0]]) if bad.size else None

    def violation_intervals(self) -> list[tuple[float, float]]:
        """Maximal runs of grid points where the necessary condition fails."""
        out = []
        bad = ~self.holds
        i, n = 0, len(bad)
        while i < n:
            if bad[i]:
                j = i
                while j + 1 < n and bad[j + 1]:
                    j += 1
                out.append((float(self.lambda_grid[i]), float(self.lambda_grid[j])))
                i = j + 1
            else:
                i += 1
        return out


def adiabaticity_condition(trace: Trace, epsilon: float = DEFAULT_EPSILON) -> AdiabaticityReport:
    """Evaluate ``1 - eps - C(lam) <= g(lam)``, necessary for ``1 - F < eps``."""
    if not 0 < epsilon < 1:
        raise DomainError("epsilon must lie in (0, 1)")
    margin = trace.g - (1.0 - epsilon - trace.C)
    return AdiabaticityReport(epsilon, trace.lambda_grid, margin >= 0, margin)


def max_driving_rate(p: ModelParams, epsilon: float = DEFAULT_EPSILON, improved: bool = True) -> float:
    """Largest driving rate compatible with adiabaticity at the mean free path.

    Uses the small-``R`` approximation ``sin R ~ R``. ``improved=False`` gives
    the weaker constant ``M = 1``.
    """
    if not 0 < epsilon < 1 - E_INV:
        raise EpsilonOutOfRange(f"epsilon={epsilon} outside (0, 1 - 1/e)")
    m = M_IMPROVED if improved else M_OLD
    return 0.5 * delta_v_closed(p) / c_n(p) * m / (1.0 - epsilon - E_INV)


@dataclass
class ScalingReport:
    N: int
    C_N: float
    deltaV_N: float
    lambda_star_asymptotic: float
    lambda_star_numeric: float
    R_at_lambda_star: float
    Gamma_N_bound: float
    epsilon: float

    CSV_COLUMNS = ("N", "C_N", "deltaV_N", "lambda_star_asym", "lambda_star_num",
                   "R_at_lambda_star", "Gamma_N_bound")

    def row(self):
        return (self.N, self.C_N, self.deltaV_N, self.lambda_star_asymptotic,
                self.lambda_star_numeric, self.R_at_lambda_star, self.Gamma_N_bound)


def scaling_report(p: ModelParams, epsilon: float = DEFAULT_EPSILON,
                   cfg: IntegratorConfig = IntegratorConfig(), points: int = 2048) -> ScalingReport:
    asym, numeric = mean_free_path(p, cfg=cfg, points=points)
    return ScalingReport(
        N=p.N,
        C_N=c_n(p),
        deltaV_N=delta_v_closed(p),
        lambda_star_asymptotic=asym,
        lambda_star_numeric=numeric,
        R_at_lambda_star=r_at_mean_free_path(p),
        Gamma_N_bound=max_driving_rate(p, epsilon),
        epsilon=epsilon,
    )
