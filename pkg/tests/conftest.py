import numpy as np
import pytest

from adiabound.bounds import build_trace
from adiabound.evolution import IntegratorConfig, evolve_many_body
from adiabound.model import DriveProtocol, ModelParams

LAMBDA_MAX = 1.5
GRID_POINTS = 2048


@pytest.fixture(scope="session")
def default_params():
    return ModelParams()


@pytest.fixture(scope="session")
def default_protocol():
    return DriveProtocol.uniform(LAMBDA_MAX, GRID_POINTS)


@pytest.fixture(scope="session")
def chain_runs(default_protocol):
    """Records and traces at J = U = 0.4, Gamma = 0.7 for the standard sizes."""
    out = {}
    for n in (4, 16, 64, 1000):
        p = ModelParams(N=n)
        rec = evolve_many_body(p, default_protocol, IntegratorConfig())
        out[n] = (p, rec, build_trace(p, default_protocol, record=rec))
    return out


def real_space_hamiltonian(p, lam):
    """Single-particle Rice-Mele matrix on 2N sites (a_0, b_0, a_1, b_1, ...), periodic."""
    n = p.N
    h = np.zeros((2 * n, 2 * n))
    for j in range(n):
        a, b, a_next = 2 * j, 2 * j + 1, (2 * j + 2) % (2 * n)
        h[a, a] += lam * p.E_R
        h[b, b] -= lam * p.E_R
        h[a, b] += -(p.J + p.U)
        h[b, a] += -(p.J + p.U)
        h[b, a_next] += -(p.J - p.U)
        h[a_next, b] += -(p.J - p.U)
    return h


def slater_log_overlap(p, lam):
    """ln |det(Phi_0^dag Phi_lam)|^2 for the half-filled real-space ground states."""
    occ = []
    for x in (0.0, lam):
        w, v = np.linalg.eigh(real_space_hamiltonian(p, x))
        occ.append(v[:, : p.N])
    _, logdet = np.linalg.slogdet(occ[0].T @ occ[1])
    return 2.0 * logdet
