"""
Two-stage temporal cross-validation.

Stage 1 tunes kappa on ridge regression and mu = tau / nu on graph shrinkage,
each on its own objective. Stage 2 (optional) searches (nu, lambda) for the
joint fit with tau = nu * mu_cv held fixed.
"""

import logging
import math
from dataclasses import dataclass
from dataclasses import field
from dataclasses import replace
from typing import Optional

import numpy as np

from src.decorators import threaded
from src.evaluation.metrics import relative_error
from src.exceptions import EmptyWindowError
from src.exceptions import InvalidConfigError
from src.graphs.features import FeatureConfig
from src.graphs.sequence import GraphSequence
from src.linalg.core import shrink
from src.model.baselines import ridge_fit
from src.model.data import Holdout
from src.model.data import TrainingData
from src.model.data import holdout
from src.model.data import prepare_training
from src.model.objective import Hyperparameters
from src.model.objective import initial_state
from src.model.objective import predict
from src.model.optimizer import OptimizerConfig
from src.model.optimizer import fit

SELECTIONS = ("feature", "graph", "sum")


def _logspace(low: float, high: float, num: int) -> list[float]:
    return [float(v) for v in np.logspace(np.log10(low), np.log10(high), num)]


@dataclass(frozen=True)
class CvGrid:
    kappa: list[float] = field(default_factory=lambda: _logspace(1e-3, 1e1, 7))
    mu: list[float] = field(default_factory=lambda: _logspace(1e-3, 1e1, 7))
    nu: list[float] = field(default_factory=lambda: _logspace(1e-2, 1e1, 5))
    lam: list[float] = field(default_factory=lambda: _logspace(1e-2, 1e1, 5))
    selection: str = "sum"
    validation_fraction: float = 0.2
    stage2: bool = True

    def __post_init__(self) -> None:
        for name in ("kappa", "mu", "nu", "lam"):
            values = getattr(self, name)
            if not values:
                raise InvalidConfigError(f"cv.{name} grid must not be empty")
            if min(values) < 0:
                raise InvalidConfigError(f"cv.{name} grid values must be >= 0")
            object.__setattr__(self, name, [float(v) for v in values])
        if self.selection not in SELECTIONS:
            raise InvalidConfigError(f"cv.selection must be one of {SELECTIONS}")
        if not 0 < self.validation_fraction <= 1:
            raise InvalidConfigError("cv.validation_fraction must lie in (0, 1]")


@dataclass(frozen=True)
class Fold:
    """Train on ``A_1 .. A_{t_v - 1}``, validate on time ``t_v``."""

    t_validate: int
    data: TrainingData
    truth: Holdout


@dataclass
class CvResult:
    selected: Hyperparameters
    kappa_cv: float
    mu_cv: float
    validation_times: list[int]
    kappa_surface: list[dict] = field(default_factory=list)
    mu_surface: list[dict] = field(default_factory=list)
    joint_surface: list[dict] = field(default_factory=list)


def validation_times(T: int, fraction: float = 0.2) -> list[int]:
    """Expanding-window validation times (1-based) in the last ``ceil(fraction T)`` steps."""
    count = math.ceil(fraction * T)
    return [t for t in range(T - count + 1, T + 1) if t >= 3]


def make_folds(
    G: GraphSequence, fraction: float = 0.2, features: FeatureConfig = FeatureConfig()
) -> list[Fold]:
    if G.T < 3:
        raise EmptyWindowError(f"Cross-validation needs at least 3 time steps, got T={G.T}")
    times = validation_times(G.T, fraction)
    if not times:
        raise EmptyWindowError(f"No validation time with a 2-step training window for T={G.T}")

    folds = []
    for t_v in times:
        data = prepare_training(G.head(t_v - 1), features)
        folds.append(Fold(t_v, data, holdout(G, t_v - 1, data.F)))
    return folds


def _mean(values: list[Optional[float]]) -> float:
    defined = [v for v in values if v is not None]
    return float(np.mean(defined)) if defined else float("inf")


def _score(feature: float, graph: float, selection: str) -> float:
    if selection == "feature":
        return feature
    if selection == "graph":
        return graph
    return feature + graph


def ridge_surface(folds: list[Fold], kappas: list[float]) -> list[dict]:
    rows = []
    for kappa in kappas:
        errors = []
        for fold in folds:
            W = ridge_fit(fold.data.Phi, fold.data.X, kappa)
            errors.append(relative_error(predict(W, fold.data.Phi[-1]), fold.truth.X_next))
        rows.append({"kappa": kappa, "feature_error": _mean(errors)})
    return rows


def shrinkage_surface(folds: list[Fold], mus: list[float]) -> list[dict]:
    rows = []
    for mu in mus:
        errors = [
            relative_error(shrink(fold.data.A_T, mu), fold.truth.A_next) for fold in folds
        ]
        rows.append({"mu": mu, "graph_error": _mean(errors)})
    return rows


@threaded()
def _joint_point(
    point: tuple[float, float],
    folds: list[Fold],
    base: Hyperparameters,
    mu_cv: float,
    cfg: OptimizerConfig,
    selection: str,
) -> dict:
    nu, lam = point
    h = replace(base, nu=nu, lam=lam, tau=nu * mu_cv)
    features, graphs = [], []
    for fold in folds:
        state, _ = fit(initial_state(fold.data), fold.data, h, cfg)
        features.append(relative_error(predict(state.W, fold.data.Phi[-1]), fold.truth.X_next))
        graphs.append(relative_error(state.S, fold.truth.A_next))
    feature, graph = _mean(features), _mean(graphs)
    return {
        "nu": nu,
        "lam": lam,
        "tau": h.tau,
        "feature_error": feature,
        "graph_error": graph,
        "score": _score(feature, graph, selection),
    }


def _argmin(rows: list[dict], key: str) -> dict:
    # first row wins ties, i.e. grid order decides
    return min(rows, key=lambda row: row[key])


def cross_validate(
    G: GraphSequence,
    grid: CvGrid = CvGrid(),
    base: Hyperparameters = Hyperparameters(),
    features: FeatureConfig = FeatureConfig(),
    cfg: OptimizerConfig = OptimizerConfig(),
    max_workers: Optional[int] = None,
) -> CvResult:
    """
    Select hyperparameters on the training sequence ``G`` only.

    Returns:
        CvResult: selected hyperparameters and every error surface.

    Raises:
        EmptyWindowError: fewer than 3 time steps or no usable validation time.
    """
    folds = make_folds(G, grid.validation_fraction, features)
    times = [fold.t_validate for fold in folds]
    logging.info(f"Cross-validating on validation times {times}")

    kappa_rows = ridge_surface(folds, grid.kappa)
    mu_rows = shrinkage_surface(folds, grid.mu)
    kappa_cv = _argmin(kappa_rows, "feature_error")["kappa"]
    mu_cv = _argmin(mu_rows, "graph_error")["mu"]
    logging.info(f"Stage 1 selected kappa={kappa_cv:.4g}, mu={mu_cv:.4g}")

    base = replace(base, kappa=kappa_cv)
    result = CvResult(
        selected=replace(base, tau=base.nu * mu_cv),
        kappa_cv=kappa_cv,
        mu_cv=mu_cv,
        validation_times=times,
        kappa_surface=kappa_rows,
        mu_surface=mu_rows,
    )
    if not grid.stage2:
        return result

    points = [(nu, lam) for nu in grid.nu for lam in grid.lam]
    joint_rows = _joint_point(
        points, folds, base, mu_cv, cfg, grid.selection, max_workers=max_workers
    )
    best = _argmin(joint_rows, "score")
    logging.info(f"Stage 2 selected nu={best['nu']:.4g}, lam={best['lam']:.4g}")
    result.joint_surface = joint_rows
    result.selected = replace(base, nu=best["nu"], lam=best["lam"], tau=best["tau"])
    return result
