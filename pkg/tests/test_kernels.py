import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import array_shapes, arrays

from speclab.errors import DimensionError, NonConvergence, ZeroMatrix
from speclab.kernels import (
    norm,
    polar_factor,
    random_orthonormal,
    sign_matrix,
    spectral_norm_upper,
    svd_truncated,
)

from .oracles import jacobi_svd, polar_via_eig

finite_matrices = arrays(
    np.float64,
    array_shapes(min_dims=2, max_dims=2, min_side=1, max_side=16),
    elements=st.floats(-1e6, 1e6, allow_nan=False),
)


def random_matrix(shape, seed, cond=None):
    rng = np.random.Generator(np.random.Philox(seed))
    A = rng.standard_normal(shape)
    if cond is not None:
        U, _, Vt = np.linalg.svd(A, full_matrices=False)
        r = min(shape)
        s = np.geomspace(1.0, 1.0 / cond, r)
        A = U @ np.diag(s) @ Vt
    return A


class TestSvd:
    @pytest.mark.parametrize("shape", [(3, 3), (7, 4), (4, 9), (1, 5), (12, 12)])
    def test_reconstruction_against_jacobi(self, shape):
        A = random_matrix(shape, seed=shape[0] * 100 + shape[1])
        f = svd_truncated(A)
        np.testing.assert_allclose(f.U @ np.diag(f.S) @ f.V.T, A, atol=1e-10)
        _, s_ref, _ = jacobi_svd(A)
        np.testing.assert_allclose(np.sort(f.S)[::-1], s_ref[: f.rank], atol=1e-9)

    def test_rank_truncation(self):
        U = random_orthonormal(6, 3, seed=0)
        V = random_orthonormal(5, 3, seed=1)
        A = U @ np.diag([2.0, 1.0, 1e-14]) @ V.T
        f = svd_truncated(A)
        assert f.rank == 2

    def test_zero_matrix_rejected(self):
        with pytest.raises(ZeroMatrix):
            svd_truncated(np.zeros((3, 3)))

    def test_vector_rejected(self):
        with pytest.raises(DimensionError):
            svd_truncated(np.ones(4))


class TestNorms:
    def test_known_values(self):
        A = np.array([[3.0, 0.0], [4.0, 0.0]])
        assert norm(A, "frobenius") == pytest.approx(5.0)
        assert norm(A, "max_abs") == pytest.approx(4.0)
        assert norm(A, "spectral") == pytest.approx(5.0)
        assert norm(A, "nuclear") == pytest.approx(5.0)

    def test_unknown_norm(self):
        with pytest.raises(ValueError):
            norm(np.eye(2), "operator")

    @settings(max_examples=60, deadline=None)
    @given(finite_matrices)
    def test_duality_pairs(self, A):
        # Each update rule's norm and the norm its dual normalizes: Frobenius
        # is self-dual, nuclear and spectral are dual, max_abs pairs with the
        # entrywise 1-norm. Checked via the pairing <A, A> <= ||A|| * ||A||_*.
        fro = norm(A, "frobenius")
        inner = float(np.sum(A * A))
        assert inner <= fro * fro * (1 + 1e-8) + 1e-12
        assert inner <= norm(A, "spectral") * norm(A, "nuclear") * (1 + 1e-8) + 1e-12
        assert inner <= norm(A, "max_abs") * float(np.sum(np.abs(A))) * (1 + 1e-8) + 1e-12

    def test_spectral_nuclear_duality_tight_on_isometry(self):
        # Equality case of the duality pairing: for a partial isometry P,
        # <P, P> = rank = ||P||_2 * ||P||_*.
        P = random_orthonormal(9, 4, seed=3)
        inner = float(np.sum(P * P))
        assert abs(inner - norm(P, "spectral") * norm(P, "nuclear")) < 1e-8


class TestSign:
    def test_zero_entries_stay_zero(self):
        A = np.array([[0.0, -2.0], [3.0, 0.0]])
        np.testing.assert_array_equal(sign_matrix(A), [[0.0, -1.0], [1.0, 0.0]])

    @settings(max_examples=40, deadline=None)
    @given(finite_matrices, st.floats(1e-3, 1e3))
    def test_positive_scale_invariance(self, A, c):
        np.testing.assert_array_equal(sign_matrix(c * A), sign_matrix(A))


class TestSpectralNormUpper:
    @pytest.mark.parametrize("seed", range(8))
    def test_never_below_true_norm(self, seed):
        A = random_matrix((11, 7), seed=seed, cond=10.0 ** (seed % 4))
        true = np.linalg.norm(A, 2)
        upper = spectral_norm_upper(A)
        assert upper >= true * (1 - 1e-13)
        assert upper <= true * 1.05

    def test_zero(self):
        assert spectral_norm_upper(np.zeros((2, 2))) == 0.0


class TestPolarFactor:
    @pytest.mark.parametrize("shape", [(5, 3), (3, 5), (6, 6)])
    def test_matches_eig_oracle(self, shape):
        A = random_matrix(shape, seed=7)
        P = polar_factor(A)
        np.testing.assert_allclose(P, polar_via_eig(A), atol=1e-10)

    def test_partial_isometry(self):
        A = random_matrix((8, 4), seed=2)
        P = polar_factor(A)
        np.testing.assert_allclose(P.T @ P, np.eye(4), atol=1e-10)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 1000), st.floats(1e-2, 1e2))
    def test_scale_invariance(self, seed, c):
        A = random_matrix((5, 4), seed=seed)
        np.testing.assert_allclose(polar_factor(c * A), polar_factor(A), atol=1e-9)

    @pytest.mark.parametrize("seed", range(10))
    def test_newton_schulz_close_to_exact(self, seed):
        A = random_matrix((16, 16), seed=seed, cond=100.0)
        P = polar_factor(A, method="newton_schulz", iterations=5)
        exact = polar_factor(A)
        assert np.max(np.abs(P - exact)) < 1e-3

    def test_newton_schulz_extra_iterations_polish(self):
        A = random_matrix((10, 6), seed=4, cond=50.0)
        err5 = np.max(np.abs(polar_factor(A, "newton_schulz", 5) - polar_factor(A)))
        err9 = np.max(np.abs(polar_factor(A, "newton_schulz", 9) - polar_factor(A)))
        assert err9 < err5

    def test_newton_schulz_nonconvergence_reported(self):
        # Condition number far beyond the schedule's design interval.
        A = np.diag([1.0, 1e-9, 1e-9])
        with pytest.raises(NonConvergence):
            polar_factor(A, method="newton_schulz", iterations=2)

    def test_zero_matrix_rejected(self):
        with pytest.raises(ZeroMatrix):
            polar_factor(np.zeros((4, 4)))


class TestRandomOrthonormal:
    def test_columns_orthonormal(self):
        Q = random_orthonormal(10, 4, seed=11)
        np.testing.assert_allclose(Q.T @ Q, np.eye(4), atol=1e-12)

    def test_deterministic_in_seed(self):
        np.testing.assert_array_equal(
            random_orthonormal(6, 6, seed=5), random_orthonormal(6, 6, seed=5)
        )
        assert not np.array_equal(
            random_orthonormal(6, 6, seed=5), random_orthonormal(6, 6, seed=6)
        )

    def test_too_many_columns(self):
        with pytest.raises(DimensionError):
            random_orthonormal(3, 4, seed=0)
