"""Driven Rice-Mele chain in momentum space and its dense tensor-product oracle.

With periodic boundaries the half-filled chain factorizes into ``N`` independent
two-level problems, one per crystal momentum ``k_j = 2 pi j / N``, each with
Bloch Hamiltonian

    h(k, lam) = [[lam*E_R, c(k)], [conj(c(k)), -lam*E_R]],
    c(k) = -(J + U) - (J - U) exp(-i k).

All many-body overlaps are products of per-mode overlaps and are accumulated
as sums of logarithms.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _modesum
from .errors import ConfigError, DimensionTooLarge, DomainError, GapClosure
from .smallmat import (
    DEGENERACY_RTOL,
    SIGMA_Z,
    DenseHermitian,
    Hermitian2,
    eig2,
    eig_dense,
    embed,
    kron_sum,
    pauli_eigvecs,
)

MAX_DENSE_MODES = 12


@dataclass(frozen=True)
class ModelParams:
    """One driven Rice-Mele instance. Energies are in units of ``E_R``.

    ``N`` counts unit cells, which equals the number of momentum modes.
    """

    J: float = 0.4
    U: float = 0.4
    E_R: float = 1.0
    Gamma: float = 0.7
    N: int = 1000

    def __post_init__(self):
        for name in ("J", "U", "E_R", "Gamma"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ConfigError(f"{name} must be a finite number, got {value!r}")
            object.__setattr__(self, name, float(value))
        if isinstance(self.N, bool) or int(self.N) != self.N or self.N < 1:
            raise ConfigError(f"N must be a positive integer, got {self.N!r}")
        object.__setattr__(self, "N", int(self.N))
        if self.E_R <= 0:
            raise ConfigError("E_R must be positive")
        if self.Gamma <= 0:
            raise ConfigError("Gamma must be positive")
        if self.J == 0 or self.U == 0:
            raise ConfigError("J = 0 or U = 0 closes the gap at lambda = 0")

    @property
    def identical_modes(self) -> bool:
        """For ``J == U`` every mode carries the same Bloch Hamiltonian."""
        return self.J == self.U

    def replace(self, **changes) -> "ModelParams":
        fields = dict(J=self.J, U=self.U, E_R=self.E_R, Gamma=self.Gamma, N=self.N)
        fields.update(changes)
        return ModelParams(**fields)


@dataclass(frozen=True)
class DriveProtocol:
    """Grid of ``lam = Gamma * t`` values, starting at 0 and strictly increasing."""

    grid: np.ndarray

    def __post_init__(self):
        g = np.array(self.grid, dtype=float).ravel()
        if g.size < 1 or g[0] != 0.0:
            raise ConfigError("lambda grid must start at 0")
        if not np.all(np.isfinite(g)) or np.any(np.diff(g) <= 0):
            raise ConfigError("lambda grid must be finite and strictly increasing")
        g.setflags(write=False)
        object.__setattr__(self, "grid", g)

    @classmethod
    def uniform(cls, lambda_max: float, points: int) -> "DriveProtocol":
        if points < 2 or not lambda_max > 0:
            raise ConfigError("need lambda_max > 0 and at least two grid points")
        return cls(np.linspace(0.0, lambda_max, points))

    @property
    def lambda_max(self) -> float:
        return float(self.grid[-1])


def momenta(n: int) -> np.ndarray:
    return 2.0 * np.pi * np.arange(n) / n


def pauli_components(p: ModelParams, k, lam=0.0):
    """Pauli vector of ``h(k, lam)`` as broadcast arrays ``(bx, by, bz)``."""
    k = np.asarray(k, dtype=float)
    dj = p.J - p.U
    bx = -(p.J + p.U) - dj * np.cos(k)
    # + 0.0 folds -0.0 into 0.0 so that J == U gives bitwise-equal vectors
    by = -dj * np.sin(k) + 0.0
    bz = np.asarray(lam, dtype=float) * p.E_R
    return np.broadcast_arrays(bx, by, bz)


def bloch_h(p: ModelParams, k: float, lam: float) -> Hermitian2:
    bx, by, bz = pauli_components(p, k, lam)
    return Hermitian2(0.0, (float(bx), float(by), float(bz)))


def ground_state_mode(p: ModelParams, k: float, lam: float) -> np.ndarray:
    e = eig2(bloch_h(p, k, lam))
    if e.degenerate:
        raise GapClosure(f"gap closed at k={k}, lambda={lam}")
    return e.v_minus


def check_gap(p: ModelParams, lam=0.0) -> None:
    bx, by, bz = pauli_components(p, momenta(p.N), lam)
    r = np.sqrt(bx * bx + by * by + bz * bz)
    if np.any(r < DEGENERACY_RTOL):
        raise GapClosure(f"gap closes on at least one mode at lambda={lam}")


def mode_log_overlaps(bx0, by0, lam, e_r):
    """``ln |<phi_k(lam)|phi_k(0)>|^2`` for modes (columns) and ``lam`` (rows).

    The log is taken of the complementary excitation probability whenever the
    overlap exceeds 1/2, which keeps it accurate for overlaps close to one.
    """
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    g0, _ = pauli_eigvecs(bx0, by0, np.zeros_like(bx0))
    lo, up = pauli_eigvecs(bx0[None, :], by0[None, :], lam[:, None] * e_r)
    a = np.abs(np.sum(np.conj(lo) * g0[None], axis=-1)) ** 2
    c = np.abs(np.sum(np.conj(up) * g0[None], axis=-1)) ** 2
    with np.errstate(divide="ignore"):
        return np.where(c < 0.5, np.log1p(-c), np.log(a))


def oc_exact(p: ModelParams, lam):
    """``ln C(lam)``, the log overlap of instantaneous and initial ground states.

    Accepts a scalar or an array of ``lam`` values.
    """
    scalar = np.ndim(lam) == 0
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    # gaps at lam != 0 are at least |lam| E_R, so only lam = 0 can close
    check_gap(p, 0.0)
    k = momenta(p.N)
    bx, by, _ = pauli_components(p, k)
    if p.identical_modes:
        x = mode_log_overlaps(bx[:1], by[:1], lam, p.E_R)[:, 0]
        total = _modesum.repeated_sum(x, p.N)
    else:
        total = np.zeros(lam.shape)
        for start, stop in _modesum.chunks(p.N):
            vals = mode_log_overlaps(bx[start:stop], by[start:stop], lam, p.E_R)
            total = total + _modesum.sequential_sum(vals.T, lam.shape)
    return float(total[0]) if scalar else total


def c_n(p: ModelParams) -> float:
    """Decay constant ``N E_R^2 / (16 J U)`` of the orthogonality catastrophe."""
    if p.J * p.U <= 0:
        raise DomainError("the asymptotic form needs J*U > 0")
    return p.N * p.E_R**2 / (16.0 * p.J * p.U)


def oc_asymptotic(p: ModelParams, lam):
    return -c_n(p) * np.square(lam)


def delta_v_closed(p: ModelParams) -> float:
    return math.sqrt(p.N) * p.E_R


def delta_v_exact(p: ModelParams) -> float:
    """Spread of ``V = E_R sum_j (n_a - n_b)`` in the initial ground state.

    Sum of per-mode variances of ``E_R sigma_z``.
    """
    check_gap(p, 0.0)
    bx, by, _ = pauli_components(p, momenta(p.N))
    g0, _ = pauli_eigvecs(bx, by, np.zeros_like(bx))
    sz = np.abs(g0[:, 0]) ** 2 - np.abs(g0[:, 1]) ** 2
    var = p.E_R**2 * (1.0 - sz * sz)
    total = 0.0
    for start, stop in _modesum.chunks(p.N):
        total = total + float(_modesum.sequential_sum(var[start:stop], ()))
    return math.sqrt(total)


def r_closed(p: ModelParams, lam):
    """Integrated initial-state energy spread, ``lam^2 dV_N / (2 Gamma)``."""
    return np.square(lam) * delta_v_closed(p) / (2.0 * p.Gamma)


class DenseModel:
    """Full ``2^N``-dimensional tensor product of the N two-level modes."""

    def __init__(self, p: ModelParams):
        if p.N > MAX_DENSE_MODES:
            raise DimensionTooLarge(f"dense backend supports N <= {MAX_DENSE_MODES}")
        self.params = p
        self.k = momenta(p.N)
        bx, by, _ = pauli_components(p, self.k)
        self._h0 = kron_sum(Hermitian2(0.0, (x, y, 0.0)).matrix() for x, y in zip(bx, by))
        self._v = p.E_R * sum(embed(SIGMA_Z, j, p.N) for j in range(p.N))

    @property
    def dim(self) -> int:
        return 2**self.params.N

    @property
    def drive(self) -> np.ndarray:
        return self._v

    def matrix(self, lam: float) -> np.ndarray:
        return self._h0 + lam * self._v

    def hamiltonian(self, lam: float) -> DenseHermitian:
        return DenseHermitian(self.matrix(lam))

    def ground_state(self, lam: float) -> np.ndarray:
        w, v = eig_dense(self.hamiltonian(lam))
        if self.dim > 1 and w[1] - w[0] < DEGENERACY_RTOL * (abs(w[0]) + 1.0):
            raise GapClosure(f"dense ground state degenerate at lambda={lam}")
        return v[:, 0]

    def ground_energy(self, lam: float) -> float:
        return float(eig_dense(self.hamiltonian(lam))[0][0])


def dense_model(p: ModelParams) -> DenseModel:
    return DenseModel(p)
