import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.typing import NDArray

from src.exceptions import DimensionMismatchError
from src.linalg.core import frobenius_norm
from src.model.data import Holdout


@dataclass(frozen=True)
class ErrorPair:
    """Relative errors; ``None`` marks a metric the method does not address."""

    feature: Optional[float]
    graph: Optional[float]


def relative_error(
    predicted: Optional[NDArray[np.float64]], truth: NDArray[np.float64], name: str = "metric"
) -> Optional[float]:
    """``||truth - predicted||_F / ||truth||_F``, or None when undefined."""
    if predicted is None:
        return None
    if predicted.shape != truth.shape:
        raise DimensionMismatchError(
            f"{name}: prediction {predicted.shape} does not match truth {truth.shape}"
        )
    scale = frobenius_norm(truth)
    if scale == 0:
        logging.warning(f"{name}: truth has zero norm; relative error undefined")
        return None
    return frobenius_norm(truth - predicted) / scale


def relative_errors(
    predicted_features: Optional[NDArray[np.float64]],
    predicted_graph: Optional[NDArray[np.float64]],
    truth: Holdout,
) -> ErrorPair:
    return ErrorPair(
        feature=relative_error(predicted_features, truth.X_next, "feature"),
        graph=relative_error(predicted_graph, truth.A_next, "graph"),
    )


@dataclass(frozen=True)
class Summary:
    mean: Optional[float]
    std: Optional[float]
    stderr: Optional[float]
    count: int


def summarize(values: list[Optional[float]]) -> Summary:
    """Mean, sample standard deviation and standard error over defined values."""
    # sorted so the result does not depend on replication order
    defined = np.sort(np.array([v for v in values if v is not None], dtype=np.float64))
    if defined.size == 0:
        return Summary(None, None, None, 0)
    mean = float(np.mean(defined))
    std = float(np.std(defined, ddof=1)) if defined.size > 1 else 0.0
    return Summary(mean, std, std / np.sqrt(defined.size), int(defined.size))
