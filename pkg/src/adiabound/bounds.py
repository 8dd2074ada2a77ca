"""Bounds on |F - C| and the resulting two-sided fidelity bands.

Three bounds are compared, all functions of the orthogonality catastrophe
``C(lam)`` and the speed-limit integral ``R(lam)``:

* ``OLD``: ``R~ = min(R, pi/2)``
* ``SIN``: ``sin R~``
* ``G``: ``sin^2(R~) |1 - 2C| + sin(2 R~~) sqrt(C (1 - C))`` with ``R~~ = min(R, pi/4)``

The pointwise version ``g(C, theta)`` uses the actual angle ``theta`` between
the evolved and initial states instead of its speed-limit bound.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid

from .errors import DegenerateArea, DomainError
from .evolution import EvolutionRecord, IntegratorConfig, evolve_many_body
from .metrics import HALF_PI, clip_qsl, random_states, theta_from_log
from .model import DriveProtocol, ModelParams, oc_exact, r_closed
from .reports import DEFAULT_SLACK_TOL, CheckReport, slack_report


class BoundKind(enum.Enum):
    OLD = "old"
    SIN = "sin"
    G = "g"


def _sqrt_c_1mc(c, one_minus_c):
    return np.sqrt(np.clip(c, 0.0, 1.0)) * np.sqrt(np.clip(one_minus_c, 0.0, 1.0))


def g_of(c, theta, one_minus_c=None):
    """Auxiliary function ``sin^2(theta)|1 - 2C| + sin(2 theta) sqrt(C) sqrt(1 - C)``.

    ``one_minus_c`` may be passed when ``1 - C`` is known more accurately than
    the subtraction would give.
    """
    c = np.asarray(c, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if np.any((c < 0) | (c > 1)) or np.any(~np.isfinite(c)):
        raise DomainError("C must lie in [0, 1]")
    if np.any((theta < 0) | (theta > HALF_PI)) or np.any(~np.isfinite(theta)):
        raise DomainError("theta must lie in [0, pi/2]")
    if one_minus_c is None:
        one_minus_c = 1.0 - c
    out = np.sin(theta) ** 2 * np.abs(1.0 - 2.0 * c) + np.sin(2.0 * theta) * _sqrt_c_1mc(c, one_minus_c)
    return out if out.ndim else float(out)


def g_parts(c, r, one_minus_c=None):
    """``(g1, g2)`` evaluated with the clipped speed-limit integrals."""
    c = np.asarray(c, dtype=float)
    if one_minus_c is None:
        one_minus_c = 1.0 - c
    rt, rtt = clip_qsl(r)
    g1 = np.sin(rt) ** 2 * np.abs(1.0 - 2.0 * c)
    g2 = np.sin(2.0 * rtt) * _sqrt_c_1mc(c, one_minus_c)
    return g1, g2


def bound_value(kind: BoundKind, c, r, one_minus_c=None):
    """Right-hand side of ``|F - C| <= bound`` for the given kind."""
    rt, _ = clip_qsl(r)
    if kind is BoundKind.OLD:
        out = rt
    elif kind is BoundKind.SIN:
        out = np.sin(rt)
    elif kind is BoundKind.G:
        g1, g2 = g_parts(c, r, one_minus_c)
        out = g1 + g2
    else:
        raise ValueError(kind)
    out = np.asarray(out, dtype=float)
    return out if out.ndim else float(out)


@dataclass
class Trace:
    """Everything needed for the bounds, on one lambda grid.

    ``log_F`` and ``log_C`` are carried alongside ``F`` and ``C`` because
    differences of fidelities close to one are computed from them.
    """

    lambda_grid: np.ndarray
    F: np.ndarray
    C: np.ndarray
    theta: np.ndarray
    R: np.ndarray
    R_tilde: np.ndarray
    R_tilde2: np.ndarray
    sinR_tilde: np.ndarray
    g1: np.ndarray
    g2: np.ndarray
    g: np.ndarray
    log_F: np.ndarray
    log_C: np.ndarray
    spread_integral: np.ndarray | None = None

    CSV_COLUMNS = ("lambda", "F", "C", "theta", "R", "R_tilde", "sinR_tilde",
                   "R_tilde2", "g1", "g2", "g")

    @property
    def one_minus_c(self) -> np.ndarray:
        return -np.expm1(self.log_C)

    @property
    def f_minus_c(self) -> np.ndarray:
        """``F - C`` without cancellation when both are close to one."""
        d = self.log_F - self.log_C
        top = np.maximum(self.log_F, self.log_C)
        return np.sign(d) * np.exp(top) * -np.expm1(-np.abs(d))

    def columns(self):
        return dict(zip(self.CSV_COLUMNS, (
            self.lambda_grid, self.F, self.C, self.theta, self.R, self.R_tilde,
            self.sinR_tilde, self.R_tilde2, self.g1, self.g2, self.g)))


def trace_from_parts(grid, log_f, log_c, log_return, r, spread_integral=None) -> Trace:
    grid = np.asarray(grid, dtype=float)
    log_c = np.asarray(log_c, dtype=float)
    c = np.exp(log_c)
    rt, rtt = clip_qsl(r)
    g1, g2 = g_parts(c, r, -np.expm1(log_c))
    return Trace(
        lambda_grid=grid,
        F=np.exp(log_f),
        C=c,
        theta=theta_from_log(log_return),
        R=np.asarray(r, dtype=float),
        R_tilde=rt,
        R_tilde2=rtt,
        sinR_tilde=np.sin(rt),
        g1=g1,
        g2=g2,
        g=g1 + g2,
        log_F=np.asarray(log_f, dtype=float),
        log_C=log_c,
        spread_integral=spread_integral,
    )


def build_trace(p: ModelParams, protocol: DriveProtocol,
                cfg: IntegratorConfig = IntegratorConfig(),
                record: EvolutionRecord | None = None) -> Trace:
    """Simulate (unless ``record`` is given) and assemble a :class:`Trace`."""
    if record is None:
        record = evolve_many_body(p, protocol, cfg)
    grid = protocol.grid
    return trace_from_parts(grid, record.log_fidelity, oc_exact(p, grid), record.log_return,
                            r_closed(p, grid), record.spread_integral)


@dataclass
class BoundBand:
    kind: BoundKind
    lambda_grid: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    area: float


def band(trace: Trace, kind: BoundKind) -> BoundBand:
    """``max(C - bound, 0) <= F <= min(C + bound, 1)``; area by trapezoid rule."""
    b = bound_value(kind, trace.C, trace.R, trace.one_minus_c)
    lower = np.maximum(trace.C - b, 0.0)
    upper = np.minimum(trace.C + b, 1.0)
    area = float(trapezoid(upper - lower, trace.lambda_grid))
    return BoundBand(kind, trace.lambda_grid, lower, upper, area)


def area_ratios(trace: Trace) -> tuple[float, float]:
    """``(area(SIN)/area(OLD), area(G)/area(OLD))`` on the trace's grid."""
    old = band(trace, BoundKind.OLD).area
    if old == 0:
        raise DegenerateArea("the OLD band has zero area")
    return band(trace, BoundKind.SIN).area / old, band(trace, BoundKind.G).area / old


def scaled_lambda_max(n: int, lambda_max_ref: float = 0.2, n_ref: int = 1000) -> float:
    """Window ``lambda_max_ref * sqrt(n_ref / n)``, shrinking like the mean free path.

    With the defaults the upper end sits near four mean free paths of the
    default chain (J = U = 0.4) for every ``N``.
    """
    return lambda_max_ref * math.sqrt(n_ref / n)


def g_crossovers(trace: Trace) -> np.ndarray:
    """Grid values (lam > 0) where ``g1 - g2`` changes sign."""
    mask = trace.lambda_grid > 0
    d = np.sign((trace.g1 - trace.g2)[mask])
    lam = trace.lambda_grid[mask]
    nz = d != 0
    d, lam = d[nz], lam[nz]
    flips = np.flatnonzero(d[1:] != d[:-1])
    return lam[flips + 1]


def verify_inequality_chain(trace: Trace, tolerance=DEFAULT_SLACK_TOL) -> list[CheckReport]:
    """Check every link of the bound chain at each grid point."""
    grid = trace.lambda_grid
    dfc = np.abs(trace.f_minus_c)
    omc = trace.one_minus_c
    g_theta = g_of(trace.C, np.clip(trace.theta, 0.0, HALF_PI), omc)
    sin_theta = np.sin(trace.theta)
    g_lam = bound_value(BoundKind.G, trace.C, trace.R, omc)
    return [
        slack_report("fc_le_g_theta", g_theta, dfc, grid, tolerance),
        slack_report("g_theta_le_sin_theta", sin_theta, g_theta, grid, tolerance),
        slack_report("fc_le_sin_theta", sin_theta, dfc, grid, tolerance),
        slack_report("sin_theta_le_sin_rt", trace.sinR_tilde, sin_theta, grid, tolerance),
        slack_report("sin_rt_le_rt", trace.R_tilde, trace.sinR_tilde, grid, tolerance),
        slack_report("fc_le_rt", trace.R_tilde, dfc, grid, tolerance),
        slack_report("fc_le_g", g_lam, dfc, grid, tolerance),
        slack_report("theta_le_rt", trace.R_tilde, trace.theta, grid, tolerance),
    ]


def lemma_s2_slacks(psi1, psi2, psi3):
    """Slacks of ``|F12 - F13| <= sin(pi/2 D23)`` and ``D23 <= D12 + D13``.

    Arguments are arrays of states with shape ``(..., dim)``.
    """
    def fid(a, b):
        return np.minimum(np.abs(np.sum(np.conj(a) * b, axis=-1)) ** 2, 1.0)

    def angle(f):
        return np.arccos(np.sqrt(f))

    f12, f13, f23 = fid(psi1, psi2), fid(psi1, psi3), fid(psi2, psi3)
    a12, a13, a23 = angle(f12), angle(f13), angle(f23)
    lemma = np.sin(a23) - np.abs(f12 - f13)
    # angles are (pi/2) D, so the triangle inequality is unchanged by the factor
    triangle = (a12 + a13 - a23) * (2.0 / math.pi)
    return lemma, triangle


def lemma_s2_check(seed: int = 42, trials: int = 100_000, dims=range(2, 9),
                   tolerance: float = -1e-12, block: int = 1000) -> tuple[CheckReport, CheckReport]:
    """Randomized check over seeded state triplets.

    Trials are generated in fixed blocks, each from its own generator seeded
    by ``(seed, block index)``, so any partition of the work gives the same
    report. Trial ``t`` uses dimension ``dims[t % len(dims)]``.
    """
    dims = list(dims)
    if trials < 1 or not dims or min(dims) < 2 or max(dims) > 16:
        raise DomainError("need trials >= 1 and dims within [2, 16]")
    worst_lemma, worst_tri = math.inf, math.inf
    for b, start in enumerate(range(0, trials, block)):
        rng = np.random.default_rng([seed, b])
        n_block = min(block, trials - start)
        t = np.arange(start, start + n_block)
        for i, d in enumerate(dims):
            count = int(np.count_nonzero(t % len(dims) == i))
            if count == 0:
                continue
            s = random_states(rng, d, 3 * count).reshape(count, 3, d)
            lemma, tri = lemma_s2_slacks(s[:, 0], s[:, 1], s[:, 2])
            worst_lemma = min(worst_lemma, float(lemma.min()))
            worst_tri = min(worst_tri, float(tri.min()))
    info = dict(seed=seed, trials=trials, dims=dims)
    return (CheckReport("lemma_s2", worst_lemma, tolerance, None, info),
            CheckReport("bures_triangle", worst_tri, tolerance, None, info))
