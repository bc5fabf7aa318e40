from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.typing import NDArray

from src.exceptions import DimensionMismatchError
from src.graphs.features import DescriptorSeries
from src.graphs.features import FeatureConfig
from src.graphs.features import FeatureMap
from src.graphs.features import FeatureSeries
from src.graphs.features import apply_feature_map
from src.graphs.features import build_descriptors
from src.graphs.features import build_feature_map
from src.graphs.sequence import GraphSequence


@dataclass(frozen=True)
class TrainingData:
    """Everything the objective needs about the training window ``1..T``."""

    G: GraphSequence
    X: FeatureSeries
    Phi: DescriptorSeries
    F: FeatureMap

    def __post_init__(self) -> None:
        n, T = self.G.n, self.G.T
        if self.X.frames.shape[:2] != (T, n) or self.Phi.frames.shape[:2] != (T, n):
            raise DimensionMismatchError(
                f"Expected features for T={T}, n={n}; got X {self.X.frames.shape} "
                f"and Phi {self.Phi.frames.shape}"
            )
        if self.F.omega.shape != (n, self.X.q):
            raise DimensionMismatchError(
                f"Omega shape {self.F.omega.shape} does not match (n, q) = ({n}, {self.X.q})"
            )

    @property
    def n(self) -> int:
        return self.G.n

    @property
    def T(self) -> int:
        return self.G.T

    @property
    def d(self) -> int:
        return self.Phi.d

    @property
    def q(self) -> int:
        return self.X.q

    @property
    def A_T(self) -> NDArray[np.float64]:
        return self.G.last


@dataclass(frozen=True)
class Holdout:
    """Truth at time ``T + 1``: features and adjacency."""

    X_next: NDArray[np.float64]
    A_next: NDArray[np.float64]


def prepare_training(
    G: GraphSequence,
    config: FeatureConfig = FeatureConfig(),
    external_X: Optional[NDArray[np.float64]] = None,
) -> TrainingData:
    """
    Build Omega from the last snapshot of ``G`` and derive X and Phi.

    Args:
        G: training window ``A_1 .. A_T``.
        config: feature map settings.
        external_X: optional ``(T, n, q')`` features replacing ``A_t Omega``.
    """
    F = build_feature_map(G, config.k_eig, config.k_clusters, config.kmeans_restarts, config.seed)
    if external_X is None:
        X = apply_feature_map(G, F)
    else:
        X = FeatureSeries(np.asarray(external_X, dtype=np.float64))
        if X.q != F.q:
            raise DimensionMismatchError(
                f"External features have q={X.q} but the feature map has q={F.q}"
            )
    return TrainingData(G=G, X=X, Phi=build_descriptors(X), F=F)


def holdout(
    full: GraphSequence,
    t_train: int,
    F: FeatureMap,
    external_X: Optional[NDArray[np.float64]] = None,
) -> Holdout:
    """Truth for the step right after the training window of length ``t_train``."""
    if not 1 <= t_train < full.T:
        raise DimensionMismatchError(
            f"t_train={t_train} must satisfy 1 <= t_train < T={full.T}"
        )
    A_next = full[t_train]
    if external_X is None:
        X_next = A_next @ F.omega
    else:
        X_next = np.asarray(external_X[t_train], dtype=np.float64)
    return Holdout(X_next=X_next, A_next=A_next)
