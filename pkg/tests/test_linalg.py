import numpy as np
import pytest

from src.exceptions import DimensionMismatchError
from src.exceptions import InvalidParameterError
from src.linalg.core import laplacian
from src.linalg.core import nuclear_norm
from src.linalg.core import numerical_rank
from src.linalg.core import project_sym_nonneg
from src.linalg.core import shrink
from src.linalg.core import singular_values
from src.linalg.core import smoothed_nuclear
from src.linalg.core import smoothed_nuclear_grad
from src.linalg.core import svd
from src.linalg.core import top_eigenvectors


def _central_difference(f, M, h=1e-6):
    grad = np.zeros_like(M)
    for idx in np.ndindex(M.shape):
        E = np.zeros_like(M)
        E[idx] = h
        grad[idx] = (f(M + E) - f(M - E)) / (2 * h)
    return grad


class TestSVD:
    def test_reconstructs_general_matrix(self, rng):
        M = rng.standard_normal((5, 3))
        factors = svd(M)
        np.testing.assert_allclose(factors.reconstruct(), M, atol=1e-12)
        assert np.all(np.diff(factors.singular_values) <= 0)

    def test_symmetric_matrix_uses_absolute_eigenvalues(self, rng):
        B = rng.standard_normal((6, 6))
        S = (B + B.T) / 2
        factors = svd(S)
        np.testing.assert_allclose(factors.reconstruct(), S, atol=1e-12)
        np.testing.assert_allclose(
            factors.singular_values, np.sort(np.abs(np.linalg.eigvalsh(S)))[::-1], atol=1e-12
        )

    def test_numerical_rank_of_low_rank_product(self, rng):
        U = rng.standard_normal((10, 3))
        assert numerical_rank(U @ U.T) == 3
        assert numerical_rank(np.zeros((4, 4))) == 0

    def test_rejects_non_matrix(self):
        with pytest.raises(DimensionMismatchError):
            svd(np.zeros(3))


class TestShrink:
    def test_zero_threshold_returns_input_exactly(self, rng):
        A = rng.uniform(size=(5, 5))
        out = shrink(A, 0.0)
        assert np.array_equal(out, A)
        assert out is not A

    def test_threshold_at_top_singular_value_gives_zero(self, rng):
        A = rng.uniform(size=(5, 5))
        out = shrink(A, singular_values(A)[0])
        assert np.all(out == 0.0)

    @pytest.mark.parametrize("mu", [0.05, 0.5, 2.0])
    def test_minimizes_proximal_objective(self, mu):
        rng = np.random.default_rng(7)

        def objective(S, A):
            return 0.5 * np.sum((S - A) ** 2) + mu * nuclear_norm(S)

        for _ in range(10):
            A = rng.standard_normal((6, 6))
            S = shrink(A, mu)
            best = objective(S, A)
            for _ in range(100):
                perturbed = S + 1e-2 * rng.standard_normal(S.shape)
                assert best <= objective(perturbed, A) + 1e-12

    def test_negative_threshold_raises(self):
        with pytest.raises(InvalidParameterError):
            shrink(np.eye(2), -1.0)


class TestSmoothedNuclear:
    @pytest.mark.parametrize("eta", [1e-3, 1e-1, 1.0])
    def test_lower_bound_within_eta_half_rank(self, eta):
        rng = np.random.default_rng(1)
        for _ in range(50):
            M = rng.standard_normal((5, 4))
            gap = nuclear_norm(M) - smoothed_nuclear(M, eta)
            assert -1e-12 <= gap <= eta * min(M.shape) / 2 + 1e-12

    @pytest.mark.parametrize("eta", [1e-3, 1e-1, 1.0])
    def test_gradient_spectral_norm_at_most_one(self, eta):
        rng = np.random.default_rng(2)
        for _ in range(50):
            grad = smoothed_nuclear_grad(rng.standard_normal((5, 4)), eta)
            assert np.linalg.norm(grad, 2) <= 1 + 1e-10

    def test_gradient_matches_finite_differences(self, rng):
        S = rng.standard_normal((4, 4))
        numeric = _central_difference(lambda M: smoothed_nuclear(M, 0.7), S)
        np.testing.assert_allclose(smoothed_nuclear_grad(S, 0.7), numeric, atol=1e-5)

    def test_large_singular_values_give_polar_factor(self):
        S = np.diag([3.0, 2.0, 1.0])
        np.testing.assert_allclose(smoothed_nuclear_grad(S, 0.5), np.eye(3), atol=1e-12)

    def test_zero_matrix(self):
        assert smoothed_nuclear(np.zeros((3, 3)), 0.1) == 0.0
        np.testing.assert_array_equal(smoothed_nuclear_grad(np.zeros((3, 3)), 0.1), 0.0)

    @pytest.mark.parametrize("eta", [0.0, -1.0])
    def test_nonpositive_eta_raises(self, eta):
        with pytest.raises(InvalidParameterError):
            smoothed_nuclear(np.eye(2), eta)


class TestProjectionAndLaplacian:
    def test_projection_is_symmetric_nonnegative_and_idempotent(self, rng):
        M = rng.standard_normal((5, 5))
        P = project_sym_nonneg(M)
        assert np.array_equal(P, P.T)
        assert np.all(P >= 0)
        np.testing.assert_array_equal(project_sym_nonneg(P), P)

    def test_projection_rejects_rectangular(self):
        with pytest.raises(DimensionMismatchError):
            project_sym_nonneg(np.zeros((2, 3)))

    def test_laplacian_rows_sum_to_zero(self, rng):
        S = project_sym_nonneg(rng.uniform(size=(6, 6)))
        L = laplacian(S)
        np.testing.assert_allclose(L.sum(axis=1), 0.0, atol=1e-12)
        assert np.all(np.linalg.eigvalsh(L) >= -1e-10)


class TestTopEigenvectors:
    def test_orthonormal_and_sign_normalized(self, rng):
        B = rng.standard_normal((7, 7))
        V = top_eigenvectors(B + B.T, 3)
        np.testing.assert_allclose(V.T @ V, np.eye(3), atol=1e-10)
        for col in V.T:
            first = col[np.flatnonzero(np.abs(col) > 1e-12)[0]]
            assert first > 0

    def test_largest_magnitude_first(self):
        S = np.diag([1.0, -5.0, 3.0])
        V = top_eigenvectors(S, 2)
        np.testing.assert_allclose(np.abs(V[:, 0]), [0.0, 1.0, 0.0])
        np.testing.assert_allclose(np.abs(V[:, 1]), [0.0, 0.0, 1.0])

    @pytest.mark.parametrize("k", [0, 4])
    def test_k_out_of_range(self, k):
        with pytest.raises(InvalidParameterError):
            top_eigenvectors(np.eye(3), k)
