"""Integration of the scaled Schrodinger equation ``i Gamma d/dlam |Psi> = H_lam |Psi>``.

The many-body state of the Rice-Mele chain is a product over momentum modes,
so each mode is propagated on its own with the exponential midpoint rule and
the many-body overlaps are sums of per-mode logarithms. Every step is an exact
unitary, so norms never drift beyond rounding.

The step count is doubled until the per-mode adiabatic fidelities at the end
of the grid stop changing by more than ``IntegratorConfig.tol``.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _backend, _modesum
from .errors import ConfigError, NoConvergence
from .model import DenseModel, DriveProtocol, ModelParams, check_gap, momenta, pauli_components
from .smallmat import DenseHermitian, expu_dense, pauli_eigvecs


@dataclass(frozen=True)
class IntegratorConfig:
    base_steps: int = 2048
    tol: float = 1e-9
    max_halvings: int = 12
    threads: int = 1
    backend: str | None = None

    def __post_init__(self):
        if int(self.base_steps) != self.base_steps or self.base_steps < 1:
            raise ConfigError("base_steps must be a positive integer")
        if not self.tol > 0:
            raise ConfigError("tol must be positive")
        if int(self.max_halvings) != self.max_halvings or self.max_halvings < 0:
            raise ConfigError("max_halvings must be a non-negative integer")
        if int(self.threads) != self.threads or self.threads < 1:
            raise ConfigError("threads must be a positive integer")

    def initial_substeps(self, n_intervals: int) -> int:
        return max(1, math.ceil(self.base_steps / max(n_intervals, 1)))


@dataclass
class EvolutionRecord:
    """Trajectory summary on the output grid.

    Attributes
    ----------
    lambda_grid : ndarray
        Output grid.
    log_fidelity : ndarray
        ``ln F(lam) = ln |<Phi_lam|Psi_lam>|^2``.
    log_return : ndarray
        ``ln |<Psi_0|Psi_lam>|^2``.
    spread_integral : ndarray
        Running integral of the energy spread of ``H_lam`` in ``|Psi_lam>``
        divided by ``Gamma``; the right side of the Mandelstam-Tamm type
        speed limit.
    substeps : int
        Fine steps per output interval of the accepted run.
    halvings : int
        Number of step doublings that were needed.
    """

    lambda_grid: np.ndarray
    log_fidelity: np.ndarray
    log_return: np.ndarray
    spread_integral: np.ndarray
    substeps: int
    halvings: int = 0
    final_mode_fidelity: np.ndarray | None = None
    states: np.ndarray | None = field(default=None, repr=False)

    @property
    def fidelity(self) -> np.ndarray:
        return np.exp(self.log_fidelity)

    @property
    def return_fidelity(self) -> np.ndarray:
        return np.exp(self.log_return)


def _spread_integral(grid, substeps, var_sum, gamma):
    """Midpoint sum of sqrt(variance) over fine steps, sampled at output points."""
    n_out = len(grid)
    out = np.zeros(n_out)
    if n_out < 2:
        return out
    dl = np.repeat(np.diff(grid) / substeps, substeps)
    contrib = np.sqrt(np.maximum(var_sum, 0.0)) * dl / gamma
    running = np.concatenate([[0.0], np.cumsum(contrib)])
    out[:] = running[::substeps]
    return out


def propagate_modes(bx, by, ez, gamma, grid, substeps, *, psi0=None, exc0=None,
                    backend=None, threads=1, keep_states=False, identical=False,
                    n_modes=None):
    """Fixed-step propagation of a set of modes; returns aggregated sums.

    Parameters
    ----------
    bx, by : array_like
        Static Pauli components per mode; ``bz = ez * lam``.
    identical : bool
        Treat the single supplied mode as ``n_modes`` identical copies.

    Returns
    -------
    dict with ``log_fid``, ``log_ret``, ``var_sum``, ``final`` and ``states``.
    """
    kernel = _backend.get(backend)
    bx = np.ascontiguousarray(bx, dtype=float)
    by = np.ascontiguousarray(by, dtype=float)
    grid = np.ascontiguousarray(grid, dtype=float)
    g0, e0 = pauli_eigvecs(bx, by, np.zeros_like(bx))
    if psi0 is not None:
        g0 = np.array(psi0, dtype=complex).reshape(g0.shape)
    if exc0 is not None:
        e0 = np.array(exc0, dtype=complex).reshape(e0.shape)
    m_total = bx.shape[0]
    states = np.zeros((m_total, len(grid), 2), dtype=complex) if keep_states else None

    def run(bounds):
        a, b = bounds
        st = states[a:b] if states is not None else None
        return kernel(bx[a:b], by[a:b], float(ez), float(gamma), grid, int(substeps),
                      np.ascontiguousarray(g0[a:b]), np.ascontiguousarray(e0[a:b]), st)

    bounds = list(_modesum.chunks(m_total))
    if threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, bounds))
    else:
        results = [run(b) for b in bounds]

    if identical:
        lf, lr, vs, fin = results[0]
        count = n_modes or m_total
        return dict(
            log_fid=_modesum.repeated_sum(lf, count),
            log_ret=_modesum.repeated_sum(lr, count),
            var_sum=_modesum.repeated_sum(vs, count),
            final=np.full(count, fin[0]),
            states=states,
        )
    log_fid = np.zeros(len(grid))
    log_ret = np.zeros(len(grid))
    var_sum = np.zeros((len(grid) - 1) * substeps)
    for lf, lr, vs, _ in results:
        log_fid = log_fid + lf
        log_ret = log_ret + lr
        var_sum = var_sum + vs
    final = np.concatenate([r[3] for r in results])
    return dict(log_fid=log_fid, log_ret=log_ret, var_sum=var_sum, final=final, states=states)


def _record(grid, substeps, out, gamma, halvings=0):
    return EvolutionRecord(
        lambda_grid=np.asarray(grid),
        log_fidelity=out["log_fid"],
        log_return=out["log_ret"],
        spread_integral=_spread_integral(grid, substeps, out["var_sum"], gamma),
        substeps=substeps,
        halvings=halvings,
        final_mode_fidelity=out["final"],
        states=out["states"],
    )


def evolve_fixed(p: ModelParams, protocol: DriveProtocol, substeps: int, *,
                 backend=None, threads=1, keep_states=False, shortcut=True) -> EvolutionRecord:
    """Many-body evolution with a fixed number of substeps per output interval."""
    check_gap(p, 0.0)
    bx, by, _ = pauli_components(p, momenta(p.N))
    identical = shortcut and p.identical_modes and not keep_states
    if identical:
        bx, by = bx[:1], by[:1]
    out = propagate_modes(bx, by, p.E_R, p.Gamma, protocol.grid, substeps,
                          backend=backend, threads=threads, keep_states=keep_states,
                          identical=identical, n_modes=p.N)
    return _record(protocol.grid, substeps, out, p.Gamma)


def _refine(run, n_intervals, cfg: IntegratorConfig):
    substeps = cfg.initial_substeps(n_intervals)
    prev = run(substeps)
    # max_halvings = 0 asks for a single fixed-step run without a convergence test
    if n_intervals == 0 or cfg.max_halvings == 0:
        return prev, substeps, 0
    for halvings in range(1, cfg.max_halvings + 1):
        substeps *= 2
        cur = run(substeps)
        change = np.max(np.abs(cur["final"] - prev["final"]))
        if change < cfg.tol:
            return cur, substeps, halvings
        prev = cur
    raise NoConvergence(
        f"final fidelity still changing by {change:.3g} after {cfg.max_halvings} halvings"
    )


def evolve_many_body(p: ModelParams, protocol: DriveProtocol,
                     cfg: IntegratorConfig = IntegratorConfig(), *,
                     keep_states=False, shortcut=True) -> EvolutionRecord:
    """Adaptive many-body evolution from the ``lam = 0`` ground state."""
    check_gap(p, 0.0)
    bx, by, _ = pauli_components(p, momenta(p.N))
    identical = shortcut and p.identical_modes and not keep_states
    if identical:
        bx, by = bx[:1], by[:1]

    def run(substeps):
        return propagate_modes(bx, by, p.E_R, p.Gamma, protocol.grid, substeps,
                               backend=cfg.backend, threads=cfg.threads,
                               keep_states=keep_states, identical=identical, n_modes=p.N)

    out, substeps, halvings = _refine(run, len(protocol.grid) - 1, cfg)
    return _record(protocol.grid, substeps, out, p.Gamma, halvings)


def evolve_mode(p: ModelParams, k: float, protocol: DriveProtocol,
                cfg: IntegratorConfig = IntegratorConfig()) -> np.ndarray:
    """Trajectory of the single mode ``k``; array of shape ``(len(grid), 2)``."""
    bx, by, _ = pauli_components(p, np.array([k]))

    def run(substeps):
        return propagate_modes(bx, by, p.E_R, p.Gamma, protocol.grid, substeps,
                               backend=cfg.backend, keep_states=True)

    out, _, _ = _refine(run, len(protocol.grid) - 1, cfg)
    return out["states"][0]


@dataclass
class DenseTrajectory:
    lambda_grid: np.ndarray
    states: np.ndarray
    log_fidelity: np.ndarray
    log_return: np.ndarray
    log_oc: np.ndarray
    spread_integral: np.ndarray


def _log_overlap(phi, psi):
    a = np.vdot(phi, psi)
    exc = np.linalg.norm(psi - a * phi) ** 2
    return math.log1p(-exc) if exc < 0.5 else math.log(abs(a) ** 2)


def evolve_dense(model: DenseModel, protocol: DriveProtocol, substeps: int) -> DenseTrajectory:
    """Brute-force evolution in the full tensor-product space (oracle backend).

    Uses the same exponential midpoint steps as the mode kernel, but with a
    generic dense eigendecomposition for every propagator.
    """
    p = model.params
    grid = protocol.grid
    phi0 = model.ground_state(0.0)
    psi = phi0.copy()
    n_out = len(grid)
    states = np.zeros((n_out, model.dim), dtype=complex)
    log_f = np.zeros(n_out)
    log_r = np.zeros(n_out)
    log_c = np.zeros(n_out)
    var = []
    for o in range(n_out):
        if o > 0:
            lam0 = grid[o - 1]
            dl = (grid[o] - lam0) / substeps
            for s in range(substeps):
                h = model.matrix(lam0 + (s + 0.5) * dl)
                hpsi = h @ psi
                var.append(np.vdot(hpsi, hpsi).real - np.vdot(psi, hpsi).real ** 2)
                psi = expu_dense(DenseHermitian(h), dl / p.Gamma) @ psi
        states[o] = psi
        phi = model.ground_state(grid[o])
        log_f[o] = _log_overlap(phi, psi)
        log_r[o] = _log_overlap(phi0, psi)
        log_c[o] = _log_overlap(phi, phi0)
    spread = _spread_integral(grid, substeps, np.array(var), p.Gamma)
    return DenseTrajectory(grid, states, log_f, log_r, log_c, spread)
