"""Comparison methods: ridge regression, rank-free fit and graph shrinkage."""

from dataclasses import dataclass
from dataclasses import replace
from typing import Optional

import numpy as np
from numpy.typing import NDArray
from scipy import linalg

from src.exceptions import DimensionMismatchError
from src.exceptions import InvalidParameterError
from src.exceptions import SingularSystemError
from src.graphs.features import DescriptorSeries
from src.graphs.features import FeatureSeries
from src.linalg.core import shrink
from src.model.data import TrainingData
from src.model.objective import Hyperparameters
from src.model.objective import ModelState
from src.model.objective import initial_state
from src.model.optimizer import OptimizerConfig
from src.model.optimizer import Trace
from src.model.optimizer import fit


@dataclass(frozen=True)
class BaselineResult:
    method: str
    predicted_features: Optional[NDArray[np.float64]] = None
    predicted_graph: Optional[NDArray[np.float64]] = None
    state: Optional[ModelState] = None
    trace: Optional[Trace] = None

    def __post_init__(self) -> None:
        if self.predicted_features is None and self.predicted_graph is None:
            raise DimensionMismatchError(f"Method '{self.method}' produced no prediction")


def ridge_fit(
    Phi: DescriptorSeries,
    X: FeatureSeries,
    kappa: float,
    anchor: Optional[NDArray[np.float64]] = None,
) -> NDArray[np.float64]:
    """
    Per-node closed form of ``sum_{t<T} ||Phi_t[i] W_i - X_{t+1}[i]||^2 + kappa/2 ||W||^2``.

    With ``anchor`` (an ``n x q`` matrix, typically ``S Omega``) the extra row
    ``||Phi_T[i] W_i - anchor[i]||^2`` is included, which gives the exact
    W-block minimizer of the joint objective for a fixed S when lambda = 0.

    Returns:
        ndarray: predictor tensor of shape ``(n, d, q)``.
    """
    if kappa < 0:
        raise InvalidParameterError(f"kappa must be >= 0, got {kappa}")
    if Phi.T != X.T or Phi.frames.shape[1] != X.frames.shape[1]:
        raise DimensionMismatchError(
            f"Descriptors {Phi.frames.shape} and features {X.frames.shape} disagree"
        )
    if Phi.T < 2:
        raise DimensionMismatchError(f"Ridge regression needs T >= 2, got T={Phi.T}")

    inputs = Phi.frames[:-1]
    targets = X.frames[1:]
    gram = np.einsum("tnd,tne->nde", inputs, inputs)
    moment = np.einsum("tnd,tnq->ndq", inputs, targets)
    if anchor is not None:
        last = Phi.frames[-1]
        gram += np.einsum("nd,ne->nde", last, last)
        moment += np.einsum("nd,nq->ndq", last, anchor)
    gram += 0.5 * kappa * np.eye(Phi.d)

    W = np.empty((Phi.frames.shape[1], Phi.d, X.q))
    for i in range(W.shape[0]):
        if kappa == 0 and np.linalg.matrix_rank(gram[i]) < Phi.d:
            raise SingularSystemError(
                f"Normal equations for node {i} are singular with kappa=0; use kappa > 0"
            )
        try:
            W[i] = linalg.solve(gram[i], moment[i], assume_a="pos")
        except (linalg.LinAlgError, ValueError) as err:
            raise SingularSystemError(
                f"Normal equations for node {i} are singular (kappa={kappa}); use kappa > 0"
            ) from err
    return W


def shrinkage_only(A_T: NDArray[np.float64], mu: float) -> NDArray[np.float64]:
    """Minimizer of ``1/2 ||S - A_T||_F^2 + mu ||S||_*`` by singular value shrinkage."""
    return shrink(A_T, mu)


def rank_free_fit(
    data: TrainingData,
    h: Hyperparameters,
    cfg: OptimizerConfig = OptimizerConfig(),
) -> tuple[ModelState, Trace]:
    """The joint fit with the nuclear-norm weight tau set to zero."""
    return fit(initial_state(data), data, replace(h, tau=0.0), cfg)
