"""Hyperparameter and generator sweeps behind the accuracy-versus-parameter plots."""

import logging
from dataclasses import replace
from typing import Optional

import numpy as np

from src.decorators import threaded
from src.evaluation.crossval import CvGrid
from src.evaluation.crossval import cross_validate
from src.evaluation.metrics import relative_errors
from src.exceptions import InvalidParameterError
from src.graphs.features import FeatureConfig
from src.model.data import Holdout
from src.model.data import TrainingData
from src.model.data import holdout
from src.model.data import prepare_training
from src.model.objective import Hyperparameters
from src.model.objective import initial_state
from src.model.objective import predict
from src.model.optimizer import OptimizerConfig
from src.model.optimizer import fit
from src.synthetic.generator import GeneratorConfig
from src.synthetic.generator import generate

SWEEPABLE = ("kappa", "tau", "nu", "lam", "eta")


def _fit_and_score(data: TrainingData, truth: Holdout, h: Hyperparameters, cfg: OptimizerConfig):
    state, trace = fit(initial_state(data), data, h, cfg)
    errors = relative_errors(predict(state.W, data.Phi[-1]), state.S, truth)
    return errors, trace.objective_values()[-1]


@threaded()
def _sweep_point(value, name, data, truth, h, cfg, mu_cv) -> dict:
    point = replace(h, **{name: value})
    if name == "nu" and mu_cv is not None:
        point = replace(point, tau=value * mu_cv)
    errors, objective = _fit_and_score(data, truth, point, cfg)
    return {
        name: value,
        "tau": point.tau,
        "feature_error": errors.feature,
        "graph_error": errors.graph,
        "objective": objective,
    }


def sweep_hyperparameter(
    data: TrainingData,
    truth: Holdout,
    h: Hyperparameters,
    cfg: OptimizerConfig,
    name: str,
    values: list[float],
    mu_cv: Optional[float] = None,
    max_workers: Optional[int] = None,
) -> list[dict]:
    """
    Held-out errors of the joint fit as one hyperparameter varies.

    With ``name == "nu"`` and ``mu_cv`` given, tau follows ``nu * mu_cv``.
    """
    if name not in SWEEPABLE:
        raise InvalidParameterError(f"Cannot sweep '{name}'; choose from {SWEEPABLE}")
    return _sweep_point(values, name, data, truth, h, cfg, mu_cv, max_workers=max_workers)


@threaded()
def _grid_cell(cell, generator, h, cfg, features, t_train) -> dict:
    epsilon, lam, seed = cell
    G, _ = generate(replace(generator, epsilon=epsilon, seed=seed))
    horizon = G.T - 1 if t_train is None else t_train
    data = prepare_training(G.head(horizon), features)
    truth = holdout(G, horizon, data.F)
    errors, _ = _fit_and_score(data, truth, replace(h, lam=lam), cfg)
    return {
        "epsilon": epsilon,
        "lam": lam,
        "seed": seed,
        "feature_error": errors.feature,
        "graph_error": errors.graph,
    }


def lambda_epsilon_grid(
    generator: GeneratorConfig,
    lambdas: list[float],
    epsilons: list[float],
    seeds: list[int],
    h: Hyperparameters = Hyperparameters(),
    cfg: OptimizerConfig = OptimizerConfig(),
    features: FeatureConfig = FeatureConfig(),
    t_train: Optional[int] = None,
    max_workers: Optional[int] = None,
) -> tuple[list[dict], list[dict]]:
    """
    Prediction accuracy as a function of lambda and of the drift strength.

    Returns:
        tuple: per-seed rows and per-(epsilon, lambda) summary rows holding
            the median errors and the bootstrap std of the feature error.
    """
    cells = [(e, lam, s) for e in epsilons for lam in lambdas for s in seeds]
    rows = _grid_cell(cells, generator, h, cfg, features, t_train, max_workers=max_workers)

    summary = []
    for epsilon in epsilons:
        for lam in lambdas:
            mine = [r for r in rows if r["epsilon"] == epsilon and r["lam"] == lam]
            feature = np.array([r["feature_error"] for r in mine], dtype=np.float64)
            graph = np.array([r["graph_error"] for r in mine], dtype=np.float64)
            summary.append(
                {
                    "epsilon": epsilon,
                    "lam": lam,
                    "feature_median": float(np.median(feature)),
                    "feature_std": float(np.std(feature, ddof=1)) if feature.size > 1 else 0.0,
                    "graph_median": float(np.median(graph)),
                }
            )
    return rows, summary


def cv_dependence(
    generator: GeneratorConfig,
    parameter: str,
    values: list[float],
    grid: CvGrid = CvGrid(stage2=False),
    features: FeatureConfig = FeatureConfig(),
    t_train: Optional[int] = None,
) -> tuple[list[dict], bool]:
    """
    Stage-1 constants chosen by cross-validation as a generator constant varies.

    Returns:
        tuple: rows ``(value, kappa_cv, mu_cv)`` and whether ``mu_cv`` is
            nonincreasing along ``values`` (a diagnostic, not a requirement).
    """
    if not hasattr(generator, parameter):
        raise InvalidParameterError(f"Generator has no parameter '{parameter}'")
    rows = []
    for value in values:
        cast = int(value) if isinstance(getattr(generator, parameter), int) else float(value)
        G, _ = generate(replace(generator, **{parameter: cast}))
        horizon = G.T - 1 if t_train is None else t_train
        result = cross_validate(G.head(horizon), replace(grid, stage2=False), features=features)
        rows.append({parameter: cast, "kappa_cv": result.kappa_cv, "mu_cv": result.mu_cv})

    mus = [row["mu_cv"] for row in rows]
    nonincreasing = all(b <= a for a, b in zip(mus, mus[1:]))
    logging.info(f"mu_cv along {parameter}={list(values)}: {mus} (nonincreasing={nonincreasing})")
    return rows, nonincreasing
