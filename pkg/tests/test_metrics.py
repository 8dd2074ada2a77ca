import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adiabound.errors import DomainError, NormViolation
from adiabound.evolution import evolve_dense, evolve_fixed, propagate_modes
from adiabound.metrics import (bures_angle, check_decomposition, check_qsl_both_variants,
                               delta_e0, delta_e0_dense, fidelity, qsl_trace,
                               qsl_variants_for_dense, qsl_variants_for_record, r_quadrature,
                               random_states, theta_from_log, theta_lambda)
from adiabound.model import DenseModel, DriveProtocol, ModelParams, pauli_components, r_closed
from adiabound.smallmat import SIGMA_Z, DenseHermitian

S2 = 1 / math.sqrt(2)


class TestFidelity:
    @pytest.mark.parametrize("psi,phi,expected", [
        ([1, 0], [1, 0], 1.0), ([1, 0], [0, 1], 0.0), ([1, 0], [S2, S2], 0.5),
        ([S2, 1j * S2], [S2, 1j * S2], 1.0),
    ])
    def test_values(self, psi, phi, expected):
        assert fidelity(psi, phi) == pytest.approx(expected, abs=1e-15)

    def test_rejects_unnormalized(self):
        with pytest.raises(NormViolation):
            fidelity([1, 1], [1, 0])

    @pytest.mark.parametrize("psi,phi,expected", [([1, 0], [1, 0], 0.0), ([1, 0], [0, 1], 1.0),
                                                  ([1, 0], [S2, S2], 0.5)])
    def test_bures_angle(self, psi, phi, expected):
        assert bures_angle(psi, phi) == pytest.approx(expected, abs=1e-12)

    @settings(max_examples=50)
    @given(st.integers(0, 2**32 - 1), st.integers(2, 8))
    def test_bures_angle_in_unit_interval_and_symmetric(self, seed, dim):
        a, b = random_states(np.random.default_rng(seed), dim, 2)
        d = bures_angle(a, b)
        assert 0.0 <= d <= 1.0
        assert d == pytest.approx(bures_angle(b, a), abs=1e-15)


class TestTheta:
    def test_from_log_limits(self):
        assert theta_from_log(0.0) == 0.0
        assert theta_from_log(-np.inf) == pytest.approx(math.pi / 2)

    @given(st.floats(1e-300, 1.0))
    def test_from_log_inverts_cos_squared(self, f):
        th = float(theta_from_log(math.log(f)))
        assert math.cos(th) ** 2 == pytest.approx(f, rel=1e-12, abs=1e-15)

    def test_small_angles_keep_precision(self):
        # cos^2 theta = 1 - 1e-20 cannot be formed directly, its log can
        assert theta_from_log(-1e-20) == pytest.approx(1e-10, rel=1e-12)

    def test_theta_lambda_against_dense_states(self):
        p = ModelParams(J=0.5, U=0.3, N=3)
        pr = DriveProtocol.uniform(1.0, 33)
        rec = evolve_fixed(p, pr, 8)
        traj = evolve_dense(DenseModel(p), pr, 8)
        assert theta_lambda(rec, 0.0) == pytest.approx(0.0, abs=1e-15)
        for i in (5, 20, 32):
            direct = math.pi / 2 * bures_angle(traj.states[0], traj.states[i])
            assert theta_lambda(rec, pr.grid[i]) == pytest.approx(direct, abs=1e-9)

    def test_theta_lambda_off_grid(self):
        rec = evolve_fixed(ModelParams(N=2), DriveProtocol.uniform(1.0, 5), 2)
        with pytest.raises(DomainError):
            theta_lambda(rec, 0.1)


class TestEnergySpread:
    def test_zero_at_start(self):
        assert delta_e0(ModelParams(), 0.0) == 0.0
        assert delta_e0(ModelParams(), 0.0, method="moments") == 0.0

    def test_value(self):
        assert delta_e0(ModelParams(), 0.1) == pytest.approx(3.16228, abs=1e-5)

    @pytest.mark.parametrize("j,u", [(0.4, 0.4), (0.5, 0.3), (0.1, 0.7)])
    def test_moments_agree_with_closed_form(self, j, u):
        p = ModelParams(J=j, U=u, N=500)
        lam = np.linspace(0, 2, 101)[1:]
        np.testing.assert_allclose(delta_e0(p, lam, "moments"), delta_e0(p, lam), rtol=1e-10)

    @pytest.mark.parametrize("lam", [0.1, 0.7, 1.5])
    def test_dense_cross_check(self, lam):
        p = ModelParams(J=0.6, U=0.3, N=2)
        assert delta_e0_dense(DenseModel(p), lam) == pytest.approx(delta_e0(p, lam, "moments"),
                                                                   rel=1e-10)

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            delta_e0(ModelParams(), 0.1, method="guess")


class TestSpeedLimit:
    def test_trace_values(self):
        q = qsl_trace(ModelParams(), DriveProtocol(np.array([0.0, 0.3])))
        assert (q.R[0], q.R_tilde[0], q.R_tilde2[0]) == (0.0, 0.0, 0.0)
        assert q.R[1] == pytest.approx(2.0329, abs=1e-4)
        assert q.R_tilde[1] == math.pi / 2
        assert q.R_tilde2[1] == math.pi / 4

    @pytest.mark.parametrize("j,u", [(0.4, 0.4), (0.5, 0.3)])
    def test_quadrature_matches_closed_form(self, j, u):
        p = ModelParams(J=j, U=u)
        grid = np.linspace(0, 1.5, 2048)
        np.testing.assert_allclose(r_quadrature(p, grid, "moments")[1:], r_closed(p, grid[1:]),
                                   rtol=1e-8)

    def test_static_hamiltonian_variants_coincide(self):
        # with ez = 0 the spread is conserved, so both integrals are the same straight line
        p = ModelParams(N=3, J=0.5, U=0.2)
        bx, by, _ = pauli_components(p, np.array([0.0, 2.0, 4.0]))
        rng = np.random.default_rng(5)
        psi0 = random_states(rng, 2, 3)
        grid = np.linspace(0, 2, 33)
        out = propagate_modes(bx, by, 0.0, p.Gamma, grid, 8, psi0=psi0)
        sx = 2 * (np.conj(psi0[:, 0]) * psi0[:, 1]).real
        sy = 2 * (np.conj(psi0[:, 0]) * psi0[:, 1]).imag
        sz = np.abs(psi0[:, 0]) ** 2 - np.abs(psi0[:, 1]) ** 2
        var0 = np.sum((by * sz) ** 2 + (bx * sz) ** 2 + (bx * sy - by * sx) ** 2)
        spread = np.sqrt(out["var_sum"])
        np.testing.assert_allclose(spread, math.sqrt(var0), rtol=1e-12)

    def test_initial_spread_variant_has_positive_interior_slack(self, chain_runs):
        p, rec, _ = chain_runs[1000]
        mask = rec.lambda_grid <= 0.3
        theta = theta_from_log(rec.log_return[mask])
        a, b = check_qsl_both_variants(rec.lambda_grid[mask], theta,
                                       r_closed(p, rec.lambda_grid[mask]),
                                       rec.spread_integral[mask])
        assert a.passed and b.passed
        assert a.detail["interior_min"] > 0

    @pytest.mark.parametrize("n", [4, 16, 64, 1000])
    def test_both_variants_on_standard_runs(self, chain_runs, n):
        p, rec, _ = chain_runs[n]
        for rep in qsl_variants_for_record(p, rec):
            assert rep.passed, rep

    def test_both_variants_on_dense_run(self):
        p = ModelParams(J=0.3, U=0.6, N=3)
        m = DenseModel(p)
        traj = evolve_dense(m, DriveProtocol.uniform(1.5, 65), 8)
        for rep in qsl_variants_for_dense(m, traj):
            assert rep.passed, rep


class TestDecomposition:
    def test_eigenstate_is_trivial(self):
        rep = check_decomposition(DenseHermitian(SIGMA_Z), np.array([1.0, 0.0]))
        assert rep.trivial and rep.delta_a == 0.0 and rep.passed

    def test_textbook_case(self):
        a = DenseHermitian(SIGMA_Z)
        psi = np.array([S2, S2])
        rep = check_decomposition(a, psi)
        assert rep.delta_a == pytest.approx(1.0)
        perp = (a.matrix @ psi - 0.0 * psi) / rep.delta_a
        np.testing.assert_allclose(perp, [S2, -S2])
        assert rep.passed

    @settings(max_examples=100)
    @given(st.integers(0, 2**32 - 1), st.integers(2, 8))
    def test_random_pairs(self, seed, dim):
        rng = np.random.default_rng(seed)
        z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        rep = check_decomposition(DenseHermitian(z + z.conj().T), random_states(rng, dim, 1)[0])
        assert rep.residual < 1e-10 and rep.overlap < 1e-10

    def test_dimension_cap(self):
        with pytest.raises(DomainError):
            check_decomposition(DenseHermitian(np.eye(65)), np.eye(65)[0])
