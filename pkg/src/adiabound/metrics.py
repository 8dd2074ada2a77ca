"""Fidelities, Bures angles and quantum-speed-limit functionals (hbar = 1)."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid

from . import _modesum
from .errors import DomainError, NormViolation
from .evolution import DenseTrajectory, EvolutionRecord
from .model import DenseModel, DriveProtocol, ModelParams, check_gap, delta_v_closed, momenta, pauli_components, r_closed
from .reports import DEFAULT_SLACK_TOL, CheckReport, slack_report
from .smallmat import DenseHermitian, pauli_eigvecs

NORM_TOL = 1e-9
HALF_PI = 0.5 * math.pi
QUARTER_PI = 0.25 * math.pi


def _check_norm(v):
    n = np.linalg.norm(v)
    if abs(n - 1.0) > NORM_TOL:
        raise NormViolation(f"state norm {n!r} deviates from 1")


def fidelity(psi, phi) -> float:
    """``|<psi|phi>|^2`` for normalized pure states."""
    psi = np.asarray(psi, dtype=complex)
    phi = np.asarray(phi, dtype=complex)
    _check_norm(psi)
    _check_norm(phi)
    return min(abs(np.vdot(psi, phi)) ** 2, 1.0)


def bures_angle(psi, phi) -> float:
    """Normalized Bures angle ``(2/pi) arccos sqrt(F)`` in [0, 1]."""
    return 2.0 / math.pi * math.acos(math.sqrt(fidelity(psi, phi)))


def theta_from_log(log_f):
    """Angle ``arccos sqrt(exp(log_f))``, accurate for ``log_f`` near zero."""
    log_f = np.asarray(log_f, dtype=float)
    sin2 = -np.expm1(log_f)
    return np.where(
        sin2 < 0.5,
        np.arcsin(np.sqrt(np.clip(sin2, 0.0, 1.0))),
        np.arccos(np.sqrt(np.exp(log_f))),
    )


def theta_lambda(record: EvolutionRecord, lam: float) -> float:
    """Angle between the evolved and the initial state at a recorded ``lam``."""
    idx = np.flatnonzero(record.lambda_grid == lam)
    if idx.size == 0:
        raise DomainError(f"lambda={lam} is not on the record grid")
    return float(theta_from_log(record.log_return[idx[0]]))


def delta_e0(p: ModelParams, lam, method: str = "closed"):
    """Energy spread of ``H_lam`` in the initial ground state.

    ``method="closed"`` uses ``|lam| dV_N`` (valid because ``H_lam = H_0 + lam V``
    and the initial state is an eigenstate of ``H_0``); ``method="moments"``
    sums the per-mode second moments directly.
    """
    if method == "closed":
        return np.abs(lam) * delta_v_closed(p)
    if method != "moments":
        raise ValueError(f"unknown method {method!r}")
    scalar = np.ndim(lam) == 0
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    check_gap(p, 0.0)
    bx, by, _ = pauli_components(p, momenta(p.N))
    g0, _ = pauli_eigvecs(bx, by, np.zeros_like(bx))
    sz = np.abs(g0[:, 0]) ** 2 - np.abs(g0[:, 1]) ** 2
    cross = np.conj(g0[:, 0]) * g0[:, 1]
    sx, sy = 2 * cross.real, 2 * cross.imag
    total = np.zeros(lam.shape)
    for start, stop in _modesum.chunks(p.N):
        sl = slice(start, stop)
        bz = lam[:, None] * p.E_R
        # r^2 - (b.s)^2 = |b x s|^2 for a pure state; the cross product avoids cancellation
        cx = by[sl] * sz[sl] - bz * sy[sl]
        cy = bz * sx[sl] - bx[sl] * sz[sl]
        cz = bx[sl] * sy[sl] - by[sl] * sx[sl]
        total = total + _modesum.sequential_sum((cx**2 + cy**2 + cz**2).T, lam.shape)
    out = np.sqrt(np.maximum(total, 0.0))
    return float(out[0]) if scalar else out


def delta_e0_dense(model: DenseModel, lam: float) -> float:
    psi0 = model.ground_state(0.0)
    hpsi = model.matrix(lam) @ psi0
    var = np.vdot(hpsi, hpsi).real - np.vdot(psi0, hpsi).real ** 2
    return math.sqrt(max(var, 0.0))


@dataclass
class QslTrace:
    lambda_grid: np.ndarray
    R: np.ndarray
    R_tilde: np.ndarray
    R_tilde2: np.ndarray


def clip_qsl(r):
    r = np.asarray(r, dtype=float)
    return np.minimum(r, HALF_PI), np.minimum(r, QUARTER_PI)


def qsl_trace(p: ModelParams, protocol: DriveProtocol) -> QslTrace:
    """Closed-form speed-limit integral for a constant driving rate."""
    r = r_closed(p, protocol.grid)
    rt, rtt = clip_qsl(r)
    return QslTrace(protocol.grid, r, rt, rtt)


def r_quadrature(p: ModelParams, grid, method: str = "closed") -> np.ndarray:
    """Trapezoid integral of ``delta_e0 / Gamma``; independent of the closed form."""
    grid = np.asarray(grid, dtype=float)
    return cumulative_trapezoid(delta_e0(p, grid, method) / p.Gamma, grid, initial=0.0)


@dataclass(frozen=True)
class DecompositionReport:
    delta_a: float
    residual: float
    overlap: float
    trivial: bool

    @property
    def passed(self) -> bool:
        return self.trivial or (self.residual < 1e-10 and self.overlap < 1e-10)


def check_decomposition(a: DenseHermitian, psi) -> DecompositionReport:
    """Split ``A|psi>`` into ``<A>|psi> + dA |psi_perp>`` and verify it."""
    if a.dim > 64:
        raise DomainError("decomposition check supports dim <= 64")
    psi = np.asarray(psi, dtype=complex)
    _check_norm(psi)
    apsi = a.matrix @ psi
    mean = np.vdot(psi, apsi).real
    spread = math.sqrt(max(np.vdot(apsi, apsi).real - mean * mean, 0.0))
    scale = max(np.linalg.norm(apsi), 1.0)
    if spread <= 1e-12 * scale:
        return DecompositionReport(spread, float(np.linalg.norm(apsi - mean * psi)), 0.0, True)
    perp = (apsi - mean * psi) / spread
    residual = np.linalg.norm(mean * psi + spread * perp - apsi) / scale
    overlap = abs(np.vdot(psi, perp))
    # perp must also be a unit vector for the spread to be the right coefficient
    residual = max(residual, abs(np.linalg.norm(perp) - 1.0))
    return DecompositionReport(spread, float(residual), float(overlap), False)


def random_states(rng: np.random.Generator, dim: int, count: int) -> np.ndarray:
    """Normalized complex Gaussian vectors, shape ``(count, dim)``."""
    z = rng.standard_normal((count, dim)) + 1j * rng.standard_normal((count, dim))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def check_qsl_both_variants(grid, theta, r_initial, r_dynamic,
                            tolerance=DEFAULT_SLACK_TOL) -> tuple[CheckReport, CheckReport]:
    """Speed limits with the initial-state spread (a) and the running spread (b)."""
    rt, _ = clip_qsl(r_initial)
    a = slack_report("qsl_initial_spread", rt, theta, grid, tolerance)
    b = slack_report("qsl_running_spread", np.minimum(r_dynamic, HALF_PI), theta, grid, tolerance)
    return a, b


def qsl_variants_for_record(p: ModelParams, record: EvolutionRecord, tolerance=DEFAULT_SLACK_TOL):
    theta = theta_from_log(record.log_return)
    return check_qsl_both_variants(record.lambda_grid, theta, r_closed(p, record.lambda_grid),
                                   record.spread_integral, tolerance)


def qsl_variants_for_dense(model: DenseModel, traj: DenseTrajectory, tolerance=DEFAULT_SLACK_TOL):
    grid = traj.lambda_grid
    spread0 = np.array([delta_e0_dense(model, x) for x in grid])
    r_initial = cumulative_trapezoid(spread0 / model.params.Gamma, grid, initial=0.0)
    theta = theta_from_log(traj.log_return)
    return check_qsl_both_variants(grid, theta, r_initial, traj.spread_integral, tolerance)
