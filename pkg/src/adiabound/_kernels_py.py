"""Pure NumPy fallback for the mode-propagation kernel.

``evolve_chunk`` propagates a chunk of independent two-level modes with the
exponential midpoint rule

    psi <- exp(-i h(lam + dl/2) dl / Gamma) psi,    h = (bx, by, ez*lam).sigma

on ``substeps`` equal steps per output interval, and returns the chunk's
contributions (added in ascending mode order):

log_fid[o]
    sum of ln|<phi_k(lam_o)|psi_k>|^2 (instantaneous ground state)
log_ret[o]
    sum of ln|<phi_k(0)|psi_k>|^2 (initial state)
var_sum[n]
    sum of the energy variances of the step Hamiltonian in the pre-step state,
    one entry per fine step
final_fid[m]
    per-mode adiabatic fidelity at the last output point

If ``states`` is given (shape ``(M, n_out, 2)``) the trajectory is stored there.
Vectorized over modes, sequential in time.
"""
from __future__ import annotations

import numpy as np


def _eigvecs(bx, by, bz):
    r = np.sqrt(bx * bx + by * by + bz * bz)
    pos = bz >= 0.0
    s = 1.0 / np.sqrt(2.0 * r * (r + np.abs(bz)))
    off = bx - 1j * by
    lo = np.stack([np.where(pos, -off, r - bz), np.where(pos, r + bz, -np.conj(off))], -1)
    up = np.stack([np.where(pos, r + bz, off), np.where(pos, np.conj(off), r - bz)], -1)
    return lo * s[:, None], up * s[:, None]


def _log_prob(a, c):
    with np.errstate(divide="ignore"):
        return np.where(c < 0.5, np.log1p(-c), np.log(a))


def _sequential(x) -> float:
    # cumsum accumulates strictly left to right, like the compiled loop
    return float(np.cumsum(x)[-1]) if len(x) else 0.0


def evolve_chunk(bx, by, ez, gamma, lam_out, substeps, psi0, exc0, states=None):
    bx = np.ascontiguousarray(bx, dtype=float)
    by = np.ascontiguousarray(by, dtype=float)
    lam_out = np.ascontiguousarray(lam_out, dtype=float)
    m_count = bx.shape[0]
    n_out = lam_out.shape[0]
    log_fid = np.zeros(n_out)
    log_ret = np.zeros(n_out)
    var_sum = np.zeros((n_out - 1) * substeps)
    psi = np.array(psi0, dtype=complex)
    g0 = np.array(psi0, dtype=complex)
    e0 = np.array(exc0, dtype=complex)
    rxy2 = bx * bx + by * by
    n = 0
    for o in range(n_out):
        if o > 0:
            lam0 = lam_out[o - 1]
            dl = (lam_out[o] - lam0) / substeps
            tau = dl / gamma
            for s in range(substeps):
                hz = ez * (lam0 + (s + 0.5) * dl)
                r = np.sqrt(rxy2 + hz * hz)
                p1, p2 = psi[:, 0], psi[:, 1]
                cross = np.conj(p1) * p2
                sz = np.abs(p1) ** 2 - np.abs(p2) ** 2
                sx, sy = 2.0 * cross.real, 2.0 * cross.imag
                var = (by * sz - hz * sy) ** 2 + (hz * sx - bx * sz) ** 2 + (bx * sy - by * sx) ** 2
                var_sum[n] = _sequential(var)
                n += 1
                cr = np.cos(r * tau)
                sr = np.where(r > 0, np.sin(r * tau) / np.where(r > 0, r, 1.0), tau)
                q1 = (cr - 1j * sr * hz) * p1 + (-sr * by - 1j * sr * bx) * p2
                q2 = (sr * by - 1j * sr * bx) * p1 + (cr + 1j * sr * hz) * p2
                psi = np.stack([q1, q2], -1)
        lo, up = _eigvecs(bx, by, np.full(m_count, ez * lam_out[o]))
        a = np.abs(np.sum(np.conj(lo) * psi, -1)) ** 2
        c = np.abs(np.sum(np.conj(up) * psi, -1)) ** 2
        log_fid[o] = _sequential(_log_prob(a, c))
        if o == n_out - 1:
            final_fid = a
        a = np.abs(np.sum(np.conj(g0) * psi, -1)) ** 2
        c = np.abs(np.sum(np.conj(e0) * psi, -1)) ** 2
        log_ret[o] = _sequential(_log_prob(a, c))
        if states is not None:
            states[:, o, :] = psi
    return log_fid, log_ret, var_sum, np.asarray(final_fid, dtype=float)
