"""
Joint objective over predictors ``W`` and next-graph estimate ``S``::

    L(W, S) = sum_{t<T} ||Phi_t W - X_{t+1}||^2 + kappa/2 ||W||^2      (J1)
            + tau g_eta(S) + nu/2 ||S - A_T||^2                          (J2)
            + ||Phi_T W - S Omega||^2                                    (J3)
            + lambda sum_ij S_ij ||W_i - W_j||^2                         (J4)

``W`` is an ``(n, d, q)`` tensor: node ``i`` predicts ``Phi_t[i] @ W[i]``.
"""

from dataclasses import dataclass
from dataclasses import fields
from typing import Optional

import numpy as np
from numpy.typing import NDArray

from src.exceptions import DimensionMismatchError
from src.exceptions import InvalidConfigError
from src.linalg.core import frobenius_norm
from src.linalg.core import laplacian
from src.linalg.core import smoothed_nuclear
from src.linalg.core import smoothed_nuclear_grad
from src.model.data import TrainingData

Tensor = NDArray[np.float64]


@dataclass(frozen=True)
class ModelState:
    W: Tensor  # (n, d, q)
    S: NDArray[np.float64]  # (n, n)

    def __post_init__(self) -> None:
        W = np.asarray(self.W, dtype=np.float64)
        S = np.asarray(self.S, dtype=np.float64)
        if W.ndim != 3 or S.shape != (W.shape[0], W.shape[0]):
            raise DimensionMismatchError(
                f"W must be (n, d, q) and S (n, n); got W {W.shape}, S {S.shape}"
            )
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "S", S)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.W**2) + np.sum(self.S**2)))

    def __sub__(self, other: "ModelState") -> "ModelState":
        return ModelState(self.W - other.W, self.S - other.S)


@dataclass(frozen=True)
class Hyperparameters:
    """Regularization weights; ``lam`` is the Laplacian coupling lambda."""

    kappa: float = 1.0
    tau: float = 0.1
    nu: float = 1.0
    lam: float = 1e-3
    eta: float = 0.1

    def __post_init__(self) -> None:
        for f in fields(self):
            value = getattr(self, f.name)
            if not np.isfinite(value):
                raise InvalidConfigError(f"hyperparameters.{f.name} must be finite")
            if value < 0:
                raise InvalidConfigError(f"hyperparameters.{f.name} must be >= 0, got {value}")
        if self.eta <= 0:
            raise InvalidConfigError(f"hyperparameters.eta must be > 0, got {self.eta}")

    @property
    def mu(self) -> Optional[float]:
        """``tau / nu``; undefined when nu is zero."""
        return self.tau / self.nu if self.nu > 0 else None


@dataclass(frozen=True)
class ObjectiveBreakdown:
    """Unweighted terms of the objective and the weighted total."""

    j1_fit: float
    j1_ridge: float
    j2_nuclear: float
    j2_prox: float
    j3_coupling: float
    j4_laplacian: float
    total: float

    def as_row(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def initial_state(data: TrainingData) -> ModelState:
    """``W = 0, S = A_T``: the minimizer of the quadratic part of the objective."""
    return ModelState(np.zeros((data.n, data.d, data.q)), data.A_T.copy())


def predict(W: Tensor, Phi: NDArray[np.float64]) -> NDArray[np.float64]:
    """Row ``i`` of the output is ``Phi[i] @ W[i]``."""
    if Phi.ndim != 2 or W.ndim != 3 or W.shape[:2] != Phi.shape:
        raise DimensionMismatchError(
            f"Predictor {W.shape} does not match descriptors {Phi.shape}"
        )
    return np.einsum("nd,ndq->nq", Phi, W)


def squared_loss(P: NDArray[np.float64], X: NDArray[np.float64]) -> float:
    if P.shape != X.shape:
        raise DimensionMismatchError(f"Loss arguments differ in shape: {P.shape} vs {X.shape}")
    return float(np.sum((P - X) ** 2))


def pairwise_dist(W: Tensor) -> NDArray[np.float64]:
    """``Delta_ij = ||W_i - W_j||_F^2``."""
    flat = W.reshape(W.shape[0], -1)
    return np.sum((flat[:, None, :] - flat[None, :, :]) ** 2, axis=-1)


def laplacian_coupling(W: Tensor, S: NDArray[np.float64]) -> float:
    """``Tr(S^T Delta(W)) = sum_ij S_ij ||W_i - W_j||_F^2``."""
    if S.shape != (W.shape[0], W.shape[0]):
        raise DimensionMismatchError(f"S {S.shape} does not match {W.shape[0]} predictors")
    return float(np.sum(S * pairwise_dist(W)))


def quadratic_form(W: Tensor, L: NDArray[np.float64], V: Tensor) -> float:
    """``Q(W, L, V) = sum_ij L_ij Tr(W_i^T V_j)``."""
    flat_W = W.reshape(W.shape[0], -1)
    flat_V = V.reshape(V.shape[0], -1)
    return float(np.sum(L * (flat_W @ flat_V.T)))


def _check(state: ModelState, data: TrainingData) -> None:
    if data.T < 2:
        raise DimensionMismatchError(f"The objective needs T >= 2, got T={data.T}")
    if state.W.shape != (data.n, data.d, data.q):
        raise DimensionMismatchError(
            f"W has shape {state.W.shape}, expected {(data.n, data.d, data.q)}"
        )
    if state.S.shape != (data.n, data.n):
        raise DimensionMismatchError(f"S has shape {state.S.shape}, expected {(data.n, data.n)}")


def evaluate(state: ModelState, data: TrainingData, h: Hyperparameters) -> ObjectiveBreakdown:
    _check(state, data)
    W, S = state.W, state.S
    Phi, X = data.Phi.frames, data.X.frames

    predictions = np.einsum("tnd,ndq->tnq", Phi[:-1], W)
    j1_fit = float(np.sum((predictions - X[1:]) ** 2))
    j1_ridge = float(np.sum(W**2))
    j2_nuclear = smoothed_nuclear(S, h.eta)
    j2_prox = frobenius_norm(S - data.A_T) ** 2
    j3 = squared_loss(predict(W, Phi[-1]), S @ data.F.omega)
    j4 = laplacian_coupling(W, S)

    total = (
        j1_fit
        + 0.5 * h.kappa * j1_ridge
        + j3
        + h.tau * j2_nuclear
        + 0.5 * h.nu * j2_prox
        + h.lam * j4
    )
    return ObjectiveBreakdown(j1_fit, j1_ridge, j2_nuclear, j2_prox, j3, j4, total)


def gradient(state: ModelState, data: TrainingData, h: Hyperparameters) -> ModelState:
    """Exact gradient of ``evaluate(...).total``, returned as a ModelState pair."""
    _check(state, data)
    W, S = state.W, state.S
    Phi, X, omega = data.Phi.frames, data.X.frames, data.F.omega

    residuals = np.einsum("tnd,ndq->tnq", Phi[:-1], W) - X[1:]
    grad_W = 2.0 * np.einsum("tnd,tnq->ndq", Phi[:-1], residuals)

    anchor_residual = predict(W, Phi[-1]) - S @ omega
    grad_W += 2.0 * np.einsum("nd,nq->ndq", Phi[-1], anchor_residual)
    grad_W += h.kappa * W
    if h.lam:
        coupling = laplacian((S + S.T) / 2.0)
        grad_W += 4.0 * h.lam * np.einsum("ij,jdq->idq", coupling, W)

    grad_S = -2.0 * anchor_residual @ omega.T + h.nu * (S - data.A_T)
    if h.lam:
        grad_S += h.lam * pairwise_dist(W)
    if h.tau:
        grad_S += h.tau * smoothed_nuclear_grad(S, h.eta)

    return ModelState(grad_W, grad_S)
