"""
Linear node features ``X_t = A_t Omega`` and the descriptor series
``Phi_t = [X_t | X_t - X_{t-1} | X_t - 2 X_{t-1} + X_{t-2}]``.
"""

import logging
from dataclasses import dataclass
from dataclasses import field

import numpy as np
from numpy.typing import NDArray
from sklearn.cluster import KMeans

from src.exceptions import DimensionMismatchError
from src.exceptions import InvalidConfigError
from src.exceptions import InvalidParameterError
from src.graphs.sequence import GraphSequence
from src.linalg.core import top_eigenvectors

DEFAULT_K_EIG = 5
DEFAULT_K_CLUSTERS = 4
DEFAULT_KMEANS_RESTARTS = 20


@dataclass(frozen=True)
class FeatureConfig:
    k_eig: int = DEFAULT_K_EIG
    k_clusters: int = DEFAULT_K_CLUSTERS
    kmeans_restarts: int = DEFAULT_KMEANS_RESTARTS
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("k_eig", "k_clusters"):
            if getattr(self, name) < 0:
                raise InvalidConfigError(f"features.{name} must be >= 0")
        if self.kmeans_restarts < 1:
            raise InvalidConfigError("features.kmeans_restarts must be >= 1")

    @property
    def q(self) -> int:
        """Columns of the feature map: constant, cluster indicators, eigenvectors."""
        return 1 + self.k_clusters + self.k_eig


@dataclass(frozen=True)
class FeatureMap:
    """Node feature map ``Omega`` (n x q) with a description of each column."""

    omega: NDArray[np.float64]
    provenance: list[str] = field(default_factory=list)

    @property
    def q(self) -> int:
        return self.omega.shape[1]


@dataclass(frozen=True)
class FeatureSeries:
    frames: NDArray[np.float64]  # (T, n, q)

    @property
    def T(self) -> int:
        return self.frames.shape[0]

    @property
    def q(self) -> int:
        return self.frames.shape[2]

    def __getitem__(self, t: int) -> NDArray[np.float64]:
        return self.frames[t]


@dataclass(frozen=True)
class DescriptorSeries:
    frames: NDArray[np.float64]  # (T, n, 3q)

    @property
    def T(self) -> int:
        return self.frames.shape[0]

    @property
    def d(self) -> int:
        return self.frames.shape[2]

    def __getitem__(self, t: int) -> NDArray[np.float64]:
        return self.frames[t]


def spectral_clusters(
    reference: NDArray[np.float64],
    k: int,
    restarts: int = DEFAULT_KMEANS_RESTARTS,
    seed: int = 0,
) -> NDArray[np.int64]:
    """
    Cluster labels from k-means on the rows of the top-k eigenvector matrix.

    Labels are renumbered by first appearance in node order.
    """
    embedding = top_eigenvectors(reference, k)
    raw = KMeans(n_clusters=k, n_init=restarts, random_state=seed).fit(embedding).labels_
    _, first_seen = np.unique(raw, return_index=True)
    order = np.argsort(first_seen)
    relabel = np.empty_like(order)
    relabel[order] = np.arange(order.size)
    return relabel[np.searchsorted(np.unique(raw), raw)]


def build_feature_map(
    G: GraphSequence,
    k_eig: int = DEFAULT_K_EIG,
    k_clusters: int = DEFAULT_K_CLUSTERS,
    restarts: int = DEFAULT_KMEANS_RESTARTS,
    seed: int = 0,
) -> FeatureMap:
    """
    Build ``Omega = [1_n | cluster indicators | top eigenvectors]`` from the
    last snapshot of ``G``; the map is held fixed for every time step.

    Args:
        G: training sequence; its last snapshot is the reference matrix.
        k_eig: number of leading eigenvectors.
        k_clusters: number of spectral clusters turned into indicator columns.

    Returns:
        FeatureMap: with ``q = 1 + k_clusters + k_eig`` columns.
    """
    n = G.n
    if k_eig < 0 or k_clusters < 0:
        raise InvalidParameterError("k_eig and k_clusters must be nonnegative")
    if 1 + k_clusters + k_eig > n:
        raise InvalidParameterError(
            f"1 + k_clusters + k_eig = {1 + k_clusters + k_eig} exceeds n = {n}"
        )

    reference = G.last
    columns = [np.ones(n)]
    provenance = ["constant"]

    if k_clusters > 0:
        labels = spectral_clusters(reference, k_clusters, restarts, seed)
        found = int(labels.max()) + 1
        if found < k_clusters:
            logging.warning(f"k-means found {found} of {k_clusters} clusters")
        for c in range(k_clusters):
            columns.append((labels == c).astype(np.float64))
            provenance.append(f"cluster:{c}")

    if k_eig > 0:
        vectors = top_eigenvectors(reference, k_eig)
        for c in range(k_eig):
            columns.append(vectors[:, c])
            provenance.append(f"eigenvector:{c}")

    return FeatureMap(np.column_stack(columns), provenance)


def apply_feature_map(G: GraphSequence, F: FeatureMap) -> FeatureSeries:
    if F.omega.shape[0] != G.n:
        raise DimensionMismatchError(
            f"Omega has {F.omega.shape[0]} rows but the graph has {G.n} nodes"
        )
    return FeatureSeries(G.snapshots @ F.omega)


def build_descriptors(X: FeatureSeries) -> DescriptorSeries:
    """
    Stack features with their velocity and acceleration.

    The missing ``X_0`` and ``X_{-1}`` are copies of ``X_1``.
    """
    frames = X.frames
    if frames.shape[0] < 1:
        raise DimensionMismatchError("Descriptors need at least one time step")
    padded = np.concatenate([frames[:1], frames[:1], frames], axis=0)
    current = padded[2:]
    previous = padded[1:-1]
    before = padded[:-2]
    velocity = current - previous
    acceleration = current - 2.0 * previous + before
    return DescriptorSeries(np.concatenate([current, velocity, acceleration], axis=2))
