"""Small complex linear algebra: closed-form 2x2 Hermitians and a dense backend.

Two-level operators are stored in Pauli form ``h = a0*I + b.sigma`` so that the
spectrum and the propagator are closed-form expressions. Dense operators are
thin wrappers around :func:`numpy.linalg.eigh` used by the brute-force oracle.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DimensionTooLarge, DomainError, NonConvergence

MAX_DENSE_DIM = 4096
DEGENERACY_RTOL = 1e-14

IDENTITY = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (SIGMA_X, SIGMA_Y, SIGMA_Z)


@dataclass(frozen=True)
class Hermitian2:
    """Two-level Hermitian operator ``a0*I + b[0]*X + b[1]*Y + b[2]*Z``."""

    a0: float
    b: tuple[float, float, float]

    def __post_init__(self):
        b = tuple(float(x) for x in self.b)
        if len(b) != 3:
            raise DomainError("Pauli vector must have three components")
        if not all(np.isfinite((self.a0,) + b)):
            raise DomainError("Hermitian2 coefficients must be finite")
        object.__setattr__(self, "a0", float(self.a0))
        object.__setattr__(self, "b", b)

    @property
    def norm_b(self) -> float:
        return float(np.sqrt(self.b[0] ** 2 + self.b[1] ** 2 + self.b[2] ** 2))

    def matrix(self) -> np.ndarray:
        bx, by, bz = self.b
        return np.array(
            [[self.a0 + bz, bx - 1j * by], [bx + 1j * by, self.a0 - bz]], dtype=complex
        )


class Eig2(NamedTuple):
    e_minus: float
    e_plus: float
    v_minus: np.ndarray
    v_plus: np.ndarray
    degenerate: bool


def gauge_fix(vecs: np.ndarray) -> np.ndarray:
    """Rotate each vector (last axis) so its largest-magnitude entry is real and >= 0.

    Ties go to the lowest index, which is what :func:`numpy.argmax` returns.
    """
    vecs = np.asarray(vecs, dtype=complex)
    idx = np.argmax(np.abs(vecs), axis=-1)
    pivot = np.take_along_axis(vecs, idx[..., None], axis=-1)
    mag = np.abs(pivot)
    phase = np.where(mag > 0, np.conj(pivot) / np.where(mag > 0, mag, 1.0), 1.0)
    out = vecs * phase
    # remove the rounding residue in the pivot's imaginary part
    np.put_along_axis(out, idx[..., None], mag + 0j, axis=-1)
    return out


def pauli_eigvecs(bx, by, bz) -> tuple[np.ndarray, np.ndarray]:
    """Lower and upper eigenvectors of ``b.sigma`` for arrays of Pauli vectors.

    Uses whichever of the two algebraically equivalent closed forms avoids
    cancellation for the sign of ``bz``. Returns gauge-fixed arrays of shape
    ``(..., 2)``. Entries with ``|b| = 0`` get the computational basis.
    """
    bx, by, bz = np.broadcast_arrays(
        np.asarray(bx, float), np.asarray(by, float), np.asarray(bz, float)
    )
    r = np.sqrt(bx * bx + by * by + bz * bz)
    off = bx - 1j * by
    pos = bz >= 0
    lower = np.empty(bx.shape + (2,), dtype=complex)
    upper = np.empty(bx.shape + (2,), dtype=complex)
    # eigenvalue -r
    lower[..., 0] = np.where(pos, -off, r - bz)
    lower[..., 1] = np.where(pos, r + bz, -np.conj(off))
    # eigenvalue +r
    upper[..., 0] = np.where(pos, r + bz, off)
    upper[..., 1] = np.where(pos, np.conj(off), r - bz)
    scale = np.sqrt(2.0 * r * (r + np.abs(bz)))
    zero = scale == 0
    safe = np.where(zero, 1.0, scale)[..., None]
    lower /= safe
    upper /= safe
    if np.any(zero):
        lower[zero] = (1.0, 0.0)
        upper[zero] = (0.0, 1.0)
    return gauge_fix(lower), gauge_fix(upper)


def is_degenerate(h: Hermitian2) -> bool:
    return h.norm_b < DEGENERACY_RTOL * (abs(h.a0) + 1.0)


def eig2(h: Hermitian2) -> Eig2:
    """Closed-form spectrum ``a0 -/+ |b|`` and gauge-fixed eigenvectors."""
    r = h.norm_b
    if is_degenerate(h):
        return Eig2(
            h.a0 - r,
            h.a0 + r,
            np.array([1.0, 0.0], dtype=complex),
            np.array([0.0, 1.0], dtype=complex),
            True,
        )
    lo, up = pauli_eigvecs(*h.b)
    return Eig2(h.a0 - r, h.a0 + r, lo, up, False)


def expu2(h: Hermitian2, tau: float) -> np.ndarray:
    """``exp(-i h tau)`` from the closed form; exact for ``|b| = 0`` as well."""
    if not np.isfinite(tau):
        raise DomainError("tau must be finite")
    r = h.norm_b
    c = np.cos(r * tau)
    # sin(r tau)/r without dividing by r
    s_over_r = tau * np.sinc(r * tau / np.pi)
    bx, by, bz = h.b
    u = np.array(
        [
            [c - 1j * s_over_r * bz, -1j * s_over_r * (bx - 1j * by)],
            [-1j * s_over_r * (bx + 1j * by), c + 1j * s_over_r * bz],
        ],
        dtype=complex,
    )
    return np.exp(-1j * h.a0 * tau) * u


class DenseHermitian:
    """A validated ``dim x dim`` Hermitian matrix."""

    __slots__ = ("matrix",)

    def __init__(self, matrix, *, rtol: float = 1e-12):
        m = np.array(matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise DomainError(f"expected a square matrix, got shape {m.shape}")
        if m.shape[0] > MAX_DENSE_DIM:
            raise DimensionTooLarge(f"dimension {m.shape[0]} exceeds {MAX_DENSE_DIM}")
        if not np.all(np.isfinite(m)):
            raise DomainError("matrix entries must be finite")
        scale = np.max(np.abs(m))
        if np.max(np.abs(m - m.conj().T)) > rtol * scale:
            raise DomainError("matrix is not Hermitian")
        m.setflags(write=False)
        self.matrix = m

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __repr__(self):
        return f"DenseHermitian(dim={self.dim})"


def eig_dense(h: DenseHermitian) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and gauge-fixed orthonormal eigenvectors (columns)."""
    try:
        w, v = np.linalg.eigh(h.matrix)
    except np.linalg.LinAlgError as exc:
        raise NonConvergence(str(exc)) from exc
    v = gauge_fix(v.T).T
    return w, v


def expu_dense(h: DenseHermitian, tau: float) -> np.ndarray:
    if not np.isfinite(tau):
        raise DomainError("tau must be finite")
    w, v = eig_dense(h)
    return (v * np.exp(-1j * w * tau)) @ v.conj().T


def embed(op: np.ndarray, site: int, n_sites: int) -> np.ndarray:
    """Place a 2x2 operator on ``site`` of an ``n_sites``-fold tensor product."""
    out = np.ones((1, 1), dtype=complex)
    for j in range(n_sites):
        out = np.kron(out, op if j == site else IDENTITY)
    return out


def kron_sum(ops) -> np.ndarray:
    """``sum_j embed(ops[j], j)``: the generator of a product of independent modes."""
    ops = list(ops)
    return sum(embed(o, j, len(ops)) for j, o in enumerate(ops))
