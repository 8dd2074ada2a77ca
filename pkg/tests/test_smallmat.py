import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from adiabound import smallmat
from adiabound.errors import DimensionTooLarge, DomainError
from adiabound.smallmat import (SIGMA_X, SIGMA_Z, DenseHermitian, Hermitian2, eig2, eig_dense,
                                embed, expu2, expu_dense, gauge_fix, kron_sum, pauli_eigvecs)

coord = st.floats(-5, 5, allow_nan=False)


class TestHermitian2:
    def test_matrix_is_exactly_hermitian(self):
        m = Hermitian2(0.2, (0.3, -0.7, 1.1)).matrix()
        assert np.array_equal(m, m.conj().T)

    def test_rejects_non_finite(self):
        with pytest.raises(DomainError):
            Hermitian2(0.0, (np.nan, 0.0, 0.0))

    @given(coord, coord, coord, coord)
    def test_eigenvalues_are_a0_pm_norm(self, a0, bx, by, bz):
        h = Hermitian2(a0, (bx, by, bz))
        e = eig2(h)
        r = math.sqrt(bx * bx + by * by + bz * bz)
        assert e.e_minus == pytest.approx(a0 - r, abs=1e-12)
        assert e.e_plus == pytest.approx(a0 + r, abs=1e-12)


class TestEig2:
    def test_symmetric_two_level(self):
        e = eig2(Hermitian2(0.0, (-0.8, 0.0, 0.0)))
        assert e.e_minus == pytest.approx(-0.8)
        np.testing.assert_allclose(e.v_minus, np.array([1, 1]) / math.sqrt(2), atol=1e-15)

    def test_diagonal(self):
        e = eig2(Hermitian2(0.0, (0.0, 0.0, 1.0)))
        assert e.e_minus == -1.0
        np.testing.assert_allclose(e.v_minus, [0, 1], atol=1e-15)

    def test_shifted_against_dense_solver(self):
        h = Hermitian2(0.3, (-0.8, 0.0, 0.4))
        e = eig2(h)
        assert e.e_minus == pytest.approx(0.3 - math.sqrt(0.8), abs=1e-14)
        assert e.e_minus == pytest.approx(-0.594427, abs=1e-6)
        assert e.e_minus == pytest.approx(np.linalg.eigvalsh(h.matrix())[0], abs=1e-14)

    def test_degenerate_flagged(self):
        e = eig2(Hermitian2(1.0, (0.0, 0.0, 0.0)))
        assert e.degenerate
        assert e.e_minus == e.e_plus == 1.0

    @settings(max_examples=200)
    @given(coord, coord, coord)
    def test_eigenvectors_solve_eigenproblem(self, bx, by, bz):
        h = Hermitian2(0.0, (bx, by, bz))
        e = eig2(h)
        if e.degenerate:
            return
        m = h.matrix()
        for val, vec in ((e.e_minus, e.v_minus), (e.e_plus, e.v_plus)):
            assert np.linalg.norm(vec) == pytest.approx(1.0, abs=1e-14)
            np.testing.assert_allclose(m @ vec, val * vec, atol=1e-12 * (1 + h.norm_b))
        assert abs(np.vdot(e.v_minus, e.v_plus)) < 1e-12

    @given(coord, coord, coord)
    def test_gauge_convention(self, bx, by, bz):
        lo, up = pauli_eigvecs(np.array([bx]), np.array([by]), np.array([bz]))
        for v in (lo[0], up[0]):
            i = int(np.argmax(np.abs(v)))
            assert v[i].imag == 0.0 and v[i].real >= 0.0

    def test_gauge_fix_removes_global_phase(self):
        v = np.array([0.6, 0.8j])
        np.testing.assert_allclose(gauge_fix(np.exp(0.7j) * v), gauge_fix(v), atol=1e-15)


class TestExpu2:
    @pytest.mark.parametrize("tau", [0.0, 0.3, 17.0])
    def test_zero_generator_is_identity(self, tau):
        np.testing.assert_array_equal(expu2(Hermitian2(0.0, (0.0, 0.0, 0.0)), tau), np.eye(2))

    def test_half_rabi_period(self):
        u = expu2(Hermitian2(0.0, (0.0, 0.0, 1.0)), math.pi)
        np.testing.assert_allclose(u, -np.eye(2), atol=1e-15)

    def test_sigma_x_rotation(self):
        u = expu2(Hermitian2(0.0, (-0.8, 0.0, 0.0)), 1.0)
        expected = math.cos(0.8) * np.eye(2) + 1j * math.sin(0.8) * SIGMA_X
        np.testing.assert_allclose(u, expected, atol=1e-15)
        np.testing.assert_allclose(u, expm(-1j * Hermitian2(0.0, (-0.8, 0, 0)).matrix()), atol=1e-14)

    @given(coord, coord, coord, coord, st.floats(-3, 3))
    def test_matches_matrix_exponential_and_is_unitary(self, a0, bx, by, bz, tau):
        h = Hermitian2(a0, (bx, by, bz))
        u = expu2(h, tau)
        np.testing.assert_allclose(u @ u.conj().T, np.eye(2), atol=1e-13)
        np.testing.assert_allclose(u, expm(-1j * tau * h.matrix()), atol=1e-11)

    def test_rejects_infinite_time(self):
        with pytest.raises(DomainError):
            expu2(Hermitian2(0.0, (1.0, 0.0, 0.0)), math.inf)


class TestDense:
    def test_identity_spectrum(self):
        w, _ = eig_dense(DenseHermitian(np.eye(3)))
        np.testing.assert_array_equal(w, [1, 1, 1])

    def test_diagonal_sorted(self):
        w, v = eig_dense(DenseHermitian(np.diag([2.0, -1.0, 0.0])))
        np.testing.assert_array_equal(w, [-1, 0, 2])
        np.testing.assert_allclose(np.abs(v), np.eye(3)[:, [1, 2, 0]])

    def test_kron_sum_spectrum_is_pairwise_sums(self):
        h1 = Hermitian2(0.1, (0.3, -0.2, 0.5))
        h2 = Hermitian2(-0.4, (0.0, 0.7, -0.1))
        w, _ = eig_dense(DenseHermitian(kron_sum([h1.matrix(), h2.matrix()])))
        e1, e2 = eig2(h1), eig2(h2)
        pairs = sorted(a + b for a in (e1.e_minus, e1.e_plus) for b in (e2.e_minus, e2.e_plus))
        np.testing.assert_allclose(w, pairs, atol=1e-13)

    def test_eigenvectors_orthonormal(self):
        rng = np.random.default_rng(3)
        z = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
        h = DenseHermitian(z + z.conj().T)
        w, v = eig_dense(h)
        np.testing.assert_allclose(v.conj().T @ v, np.eye(6), atol=1e-13)
        np.testing.assert_allclose(h.matrix @ v, v * w, atol=1e-12)

    @pytest.mark.parametrize("matrix", [np.ones((2, 3)), np.array([[0, 1], [2, 0]]),
                                        np.array([[np.inf, 0], [0, 0]])])
    def test_invalid_matrices(self, matrix):
        with pytest.raises(DomainError):
            DenseHermitian(matrix)

    def test_dimension_limit(self, monkeypatch):
        monkeypatch.setattr(smallmat, "MAX_DENSE_DIM", 4)
        with pytest.raises(DimensionTooLarge):
            DenseHermitian(np.eye(5))

    def test_expu_dense_identity_at_zero_time(self):
        h = DenseHermitian(kron_sum([SIGMA_X, SIGMA_Z]))
        np.testing.assert_allclose(expu_dense(h, 0.0), np.eye(4), atol=1e-14)

    def test_expu_dense_diagonal_phases(self):
        d = np.array([0.5, -1.0, 2.0])
        np.testing.assert_allclose(expu_dense(DenseHermitian(np.diag(d)), 0.7),
                                   np.diag(np.exp(-0.7j * d)), atol=1e-15)

    def test_expu_dense_agrees_with_expu2_on_embedded_block(self):
        h = Hermitian2(0.0, (0.3, -0.6, 0.2))
        big = DenseHermitian(embed(h.matrix(), 1, 3))
        np.testing.assert_allclose(expu_dense(big, 1.3),
                                   np.kron(np.kron(np.eye(2), expu2(h, 1.3)), np.eye(2)),
                                   atol=1e-13)
