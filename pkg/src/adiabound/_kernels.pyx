# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled exponential-midpoint propagation of independent two-level modes.

Mirrors ``_kernels_py.evolve_chunk``; see that module for the contract.
"""
import numpy as np

from libc.math cimport cos, sin, sqrt, log, log1p


cdef inline void _eigvecs(double bx, double by, double bz,
                          double* lo, double* up) noexcept nogil:
    # lo/up: [re0, im0, re1, im1] of the -r / +r eigenvectors
    cdef double r = sqrt(bx * bx + by * by + bz * bz)
    cdef double s
    if r == 0.0:
        lo[0] = 1.0; lo[1] = 0.0; lo[2] = 0.0; lo[3] = 0.0
        up[0] = 0.0; up[1] = 0.0; up[2] = 1.0; up[3] = 0.0
        return
    if bz >= 0.0:
        s = 1.0 / sqrt(2.0 * r * (r + bz))
        lo[0] = -bx * s; lo[1] = by * s; lo[2] = (r + bz) * s; lo[3] = 0.0
        up[0] = (r + bz) * s; up[1] = 0.0; up[2] = bx * s; up[3] = by * s
    else:
        s = 1.0 / sqrt(2.0 * r * (r - bz))
        lo[0] = (r - bz) * s; lo[1] = 0.0; lo[2] = -bx * s; lo[3] = -by * s
        up[0] = bx * s; up[1] = -by * s; up[2] = (r - bz) * s; up[3] = 0.0


cdef inline double _abs2_inner(const double* v, double p1r, double p1i,
                               double p2r, double p2i) noexcept nogil:
    # |<v|psi>|^2
    cdef double re = v[0] * p1r + v[1] * p1i + v[2] * p2r + v[3] * p2i
    cdef double im = v[0] * p1i - v[1] * p1r + v[2] * p2i - v[3] * p2r
    return re * re + im * im


cdef inline double _log_prob(double a, double c) noexcept nogil:
    # ln|a-amplitude|^2 given both squared amplitudes of a two-level split
    if c < 0.5:
        return log1p(-c)
    return log(a)


def evolve_chunk(const double[::1] bx, const double[::1] by, double ez, double gamma,
                 const double[::1] lam_out, Py_ssize_t substeps,
                 const double complex[:, ::1] psi0, const double complex[:, ::1] exc0,
                 double complex[:, :, ::1] states=None):
    cdef Py_ssize_t m_count = bx.shape[0]
    cdef Py_ssize_t n_out = lam_out.shape[0]
    cdef Py_ssize_t n_fine = (n_out - 1) * substeps
    log_fid_arr = np.zeros(n_out)
    log_ret_arr = np.zeros(n_out)
    var_arr = np.zeros(n_fine)
    final_arr = np.zeros(m_count)
    cdef double[::1] log_fid = log_fid_arr
    cdef double[::1] log_ret = log_ret_arr
    cdef double[::1] var_sum = var_arr
    cdef double[::1] final_fid = final_arr
    cdef bint keep = states is not None

    cdef Py_ssize_t m, o, s, n
    cdef double p1r, p1i, p2r, p2i, q1r, q1i, q2r, q2i
    cdef double lo[4]
    cdef double up[4]
    cdef double g0[4]
    cdef double e0[4]
    cdef double a, c, lam0, dl, tau, lm, hx, hy, hz, r, cr, sr
    cdef double sx, sy, sz, cx, cy, cz
    cdef double u11r, u11i, u12r, u12i, u21r, u21i, u22r, u22i

    with nogil:
        for m in range(m_count):
            hx = bx[m]
            hy = by[m]
            g0[0] = psi0[m, 0].real; g0[1] = psi0[m, 0].imag
            g0[2] = psi0[m, 1].real; g0[3] = psi0[m, 1].imag
            e0[0] = exc0[m, 0].real; e0[1] = exc0[m, 0].imag
            e0[2] = exc0[m, 1].real; e0[3] = exc0[m, 1].imag
            p1r = g0[0]; p1i = g0[1]; p2r = g0[2]; p2i = g0[3]
            n = 0
            for o in range(n_out):
                if o > 0:
                    lam0 = lam_out[o - 1]
                    dl = (lam_out[o] - lam0) / substeps
                    tau = dl / gamma
                    for s in range(substeps):
                        lm = lam0 + (s + 0.5) * dl
                        hz = ez * lm
                        r = sqrt(hx * hx + hy * hy + hz * hz)
                        # energy variance of the step Hamiltonian, conserved over the
                        # step: |b x s|^2 with s the Bloch vector (no cancellation)
                        sz = p1r * p1r + p1i * p1i - p2r * p2r - p2i * p2i
                        sx = 2.0 * (p1r * p2r + p1i * p2i)
                        sy = 2.0 * (p1r * p2i - p1i * p2r)
                        cx = hy * sz - hz * sy
                        cy = hz * sx - hx * sz
                        cz = hx * sy - hy * sx
                        var_sum[n] += cx * cx + cy * cy + cz * cz
                        n += 1
                        cr = cos(r * tau)
                        if r > 0.0:
                            sr = sin(r * tau) / r
                        else:
                            sr = tau
                        u11r = cr; u11i = -sr * hz
                        u22r = cr; u22i = sr * hz
                        u12r = -sr * hy; u12i = -sr * hx
                        u21r = sr * hy; u21i = -sr * hx
                        q1r = u11r * p1r - u11i * p1i + u12r * p2r - u12i * p2i
                        q1i = u11r * p1i + u11i * p1r + u12r * p2i + u12i * p2r
                        q2r = u21r * p1r - u21i * p1i + u22r * p2r - u22i * p2i
                        q2i = u21r * p1i + u21i * p1r + u22r * p2i + u22i * p2r
                        p1r = q1r; p1i = q1i; p2r = q2r; p2i = q2i
                _eigvecs(hx, hy, ez * lam_out[o], lo, up)
                a = _abs2_inner(lo, p1r, p1i, p2r, p2i)
                c = _abs2_inner(up, p1r, p1i, p2r, p2i)
                log_fid[o] += _log_prob(a, c)
                if o == n_out - 1:
                    final_fid[m] = a
                a = _abs2_inner(g0, p1r, p1i, p2r, p2i)
                c = _abs2_inner(e0, p1r, p1i, p2r, p2i)
                log_ret[o] += _log_prob(a, c)
                if keep:
                    states[m, o, 0].real = p1r
                    states[m, o, 0].imag = p1i
                    states[m, o, 1].real = p2r
                    states[m, o, 1].imag = p2i
    return log_fid_arr, log_ret_arr, var_arr, final_arr
