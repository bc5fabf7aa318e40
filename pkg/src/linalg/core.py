"""
Dense matrix primitives: norms, graph Laplacian, SVD-derived operators,
the smoothed nuclear norm and the projections used by the optimizer.

All functions are pure; inputs are never modified in place.
"""

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy import linalg

from src.exceptions import DimensionMismatchError
from src.exceptions import InvalidParameterError
from src.exceptions import NonFiniteError

Matrix = NDArray[np.float64]

# singular values below RANK_CUTOFF * sigma_1 count as zero
RANK_CUTOFF = 1e-12


@dataclass(frozen=True)
class SVDFactors:
    """Thin SVD ``U @ diag(singular_values) @ V.T`` with sorted values."""

    U: Matrix
    singular_values: NDArray[np.float64]
    V: Matrix

    def reconstruct(self) -> Matrix:
        return (self.U * self.singular_values) @ self.V.T

    def rank(self) -> int:
        return int(np.count_nonzero(self.singular_values))


def _as_matrix(M) -> Matrix:
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2:
        raise DimensionMismatchError(f"Expected a 2-d matrix, got shape {M.shape}")
    return M


def _check_eta(eta: float) -> None:
    if not eta > 0:
        raise InvalidParameterError(f"eta must be positive, got {eta}")


def ensure_finite(M, name: str = "matrix") -> None:
    if not np.all(np.isfinite(M)):
        raise NonFiniteError(f"{name} contains NaN or Inf entries")


def is_symmetric(M: Matrix) -> bool:
    return M.shape[0] == M.shape[1] and np.array_equal(M, M.T)


def svd(M) -> SVDFactors:
    """
    Thin SVD with nonincreasing singular values.

    Exactly symmetric inputs go through the symmetric eigensolver:
    ``S = Q diag(lam) Q.T`` gives ``U = Q``, ``sigma = |lam|`` and
    ``V = Q * sign(lam)``. Values under the rank cutoff are set to zero.
    """
    M = _as_matrix(M)
    ensure_finite(M)
    if min(M.shape) == 0:
        k = 0
        return SVDFactors(
            np.zeros((M.shape[0], k)), np.zeros(k), np.zeros((M.shape[1], k))
        )

    if is_symmetric(M):
        lam, Q = linalg.eigh(M)
        order = np.argsort(-np.abs(lam), kind="stable")
        lam, Q = lam[order], Q[:, order]
        sigma = np.abs(lam)
        signs = np.where(lam < 0, -1.0, 1.0)
        U, V = Q, Q * signs
    else:
        U, sigma, Vt = linalg.svd(M, full_matrices=False, lapack_driver="gesvd")
        V = Vt.T

    if sigma.size and sigma[0] > 0:
        sigma = np.where(sigma < RANK_CUTOFF * sigma[0], 0.0, sigma)
    return SVDFactors(U, sigma, V)


def singular_values(M) -> NDArray[np.float64]:
    return svd(M).singular_values


def numerical_rank(M) -> int:
    return svd(M).rank()


def frobenius_norm(M) -> float:
    M = np.asarray(M, dtype=np.float64)
    return float(np.sqrt(np.sum(M * M)))


def nuclear_norm(M) -> float:
    return float(np.sum(singular_values(M)))


def laplacian(S) -> Matrix:
    """Graph Laplacian ``D - S`` with ``D`` the diagonal of row sums."""
    S = _as_matrix(S)
    if S.shape[0] != S.shape[1]:
        raise DimensionMismatchError(f"Laplacian needs a square matrix, got {S.shape}")
    return np.diag(S.sum(axis=1)) - S


def smoothed_nuclear(S, eta: float) -> float:
    """
    Smoothed nuclear norm g_eta(S), a differentiable lower bound of ||S||_*.

    Closed form of ``max_Z <S, Z> - eta/2 ||Z||_F^2`` over the spectral-norm
    unit ball, evaluated per singular value (Huber-type):
    ``s^2 / (2 eta)`` when ``s < eta`` and ``s - eta / 2`` otherwise.
    """
    _check_eta(eta)
    sigma = singular_values(S)
    value = np.where(sigma < eta, sigma**2 / (2.0 * eta), sigma - eta / 2.0)
    return float(np.sum(value))


def smoothed_nuclear_grad(S, eta: float) -> Matrix:
    """Gradient ``U diag(min(1, s / eta)) V.T`` of ``smoothed_nuclear``."""
    _check_eta(eta)
    factors = svd(S)
    weights = np.minimum(1.0, factors.singular_values / eta)
    return (factors.U * weights) @ factors.V.T


def shrink(A, mu: float) -> Matrix:
    """
    Singular value soft-thresholding ``U diag((s - mu)_+) V.T``.

    This is the proximal operator of ``mu ||.||_*``, i.e. the minimizer of
    ``1/2 ||S - A||_F^2 + mu ||S||_*``.
    """
    if mu < 0:
        raise InvalidParameterError(f"mu must be nonnegative, got {mu}")
    A = _as_matrix(A)
    if mu == 0:
        return A.copy()
    factors = svd(A)
    shrunk = np.maximum(factors.singular_values - mu, 0.0)
    return (factors.U * shrunk) @ factors.V.T


def project_sym_nonneg(M) -> Matrix:
    """Frobenius projection onto symmetric matrices with nonnegative entries."""
    M = _as_matrix(M)
    if M.shape[0] != M.shape[1]:
        raise DimensionMismatchError(f"Projection needs a square matrix, got {M.shape}")
    return np.maximum((M + M.T) / 2.0, 0.0)


def top_eigenvectors(S, k: int) -> Matrix:
    """
    Orthonormal eigenvectors of the ``k`` largest-magnitude eigenvalues.

    Ties in magnitude are broken by the position of each vector's dominant
    component; every vector is signed so its first nonzero entry is positive.
    """
    S = _as_matrix(S)
    n = S.shape[0]
    if S.shape[1] != n:
        raise DimensionMismatchError(f"Eigenvectors need a square matrix, got {S.shape}")
    if not 1 <= k <= n:
        raise InvalidParameterError(f"k must lie in [1, {n}], got {k}")
    ensure_finite(S)

    lam, Q = linalg.eigh((S + S.T) / 2.0)
    dominant = np.argmax(np.abs(Q), axis=0)
    order = np.lexsort((dominant, -np.abs(lam)))
    vectors = Q[:, order[:k]].copy()

    for col in range(k):
        v = vectors[:, col]
        nonzero = np.flatnonzero(np.abs(v) > 1e-12 * np.max(np.abs(v)))
        if nonzero.size and v[nonzero[0]] < 0:
            vectors[:, col] = -v
    return vectors
