from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from src.exceptions import DimensionMismatchError
from src.exceptions import InvalidGraphError


@dataclass(frozen=True)
class GraphSequence:
    """
    Ordered adjacency snapshots ``A_1 .. A_T`` stored as a ``(T, n, n)`` array.

    Args:
        snapshots: stacked symmetric nonnegative adjacency matrices.
        monotone: when True, edge weights must be nondecreasing in time.
    """

    snapshots: NDArray[np.float64]
    monotone: bool = False

    def __post_init__(self) -> None:
        snapshots = np.asarray(self.snapshots, dtype=np.float64)
        if snapshots.ndim != 3 or snapshots.shape[1] != snapshots.shape[2]:
            raise DimensionMismatchError(
                f"Snapshots must have shape (T, n, n), got {snapshots.shape}"
            )
        if snapshots.shape[0] < 1:
            raise DimensionMismatchError("A graph sequence needs at least one snapshot")
        object.__setattr__(self, "snapshots", snapshots)
        self.validate()

    @property
    def n(self) -> int:
        return self.snapshots.shape[1]

    @property
    def T(self) -> int:
        return self.snapshots.shape[0]

    def __len__(self) -> int:
        return self.T

    def __getitem__(self, t: int) -> NDArray[np.float64]:
        return self.snapshots[t]

    @property
    def last(self) -> NDArray[np.float64]:
        return self.snapshots[-1]

    def head(self, t: int) -> "GraphSequence":
        """First ``t`` snapshots, i.e. the training window ending at time t."""
        if not 1 <= t <= self.T:
            raise DimensionMismatchError(f"Window length {t} outside [1, {self.T}]")
        return GraphSequence(self.snapshots[:t], monotone=self.monotone)

    def validate(self) -> None:
        """Check symmetry, nonnegativity and (if declared) monotonicity.

        Raises:
            InvalidGraphError: with the first offending (t, i, j), 1-based in t.
        """
        if not np.all(np.isfinite(self.snapshots)):
            t, i, j = np.argwhere(~np.isfinite(self.snapshots))[0]
            raise InvalidGraphError(
                f"Non-finite weight at t={t + 1}, i={i}, j={j}", (t + 1, i, j)
            )

        asym = self.snapshots != np.transpose(self.snapshots, (0, 2, 1))
        if asym.any():
            t, i, j = np.argwhere(asym)[0]
            raise InvalidGraphError(
                f"Snapshot not symmetric at t={t + 1}, i={i}, j={j}", (t + 1, i, j)
            )

        negative = self.snapshots < 0
        if negative.any():
            t, i, j = np.argwhere(negative)[0]
            raise InvalidGraphError(
                f"Negative weight at t={t + 1}, i={i}, j={j}", (t + 1, i, j)
            )

        if self.monotone and self.T > 1:
            decreasing = np.diff(self.snapshots, axis=0) < 0
            if decreasing.any():
                t, i, j = np.argwhere(decreasing)[0]
                raise InvalidGraphError(
                    f"Weight decreases between t={t + 1} and t={t + 2} "
                    f"at i={i}, j={j}",
                    (t + 2, i, j),
                )
