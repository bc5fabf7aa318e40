"""
Experiment commands behind the CLI.

Every command takes a resolved ``RunConfig`` and an output directory, writes
``config.yaml`` (the resolved config) next to its results and returns the
output directory. Re-running a command with ``--config <out>/config.yaml``
reproduces every file byte for byte.
"""

import logging
from dataclasses import replace
from pathlib import Path
from typing import Optional

from src.contexts.run import RunConfig
from src.decorators import log_execution
from src.evaluation.bootstrap import bootstrap_table
from src.evaluation.crossval import cross_validate
from src.evaluation.metrics import relative_error
from src.evaluation.metrics import relative_errors
from src.evaluation.sweeps import lambda_epsilon_grid
from src.evaluation.sweeps import sweep_hyperparameter
from src.exceptions import InvalidConfigError
from src.exceptions import InvalidDatasetError
from src.formats.dataset import read_dataset
from src.formats.dataset import write_dataset
from src.formats.tables import write_csv
from src.formats.tables import write_matrix
from src.formats.tables import write_yaml
from src.methods.base import MethodFactory
from src.model.data import Holdout
from src.model.data import TrainingData
from src.model.data import holdout
from src.model.data import prepare_training
from src.model.objective import ModelState
from src.model.objective import initial_state
from src.model.objective import predict
from src.model.optimizer import fit
from src.synthetic.generator import RNG_ALGORITHM
from src.synthetic.generator import generate

CONFIG_FILE = "config.yaml"
BASELINE_METHODS = ["ridge", "shrinkage"]


def _write_config(out: Path, config: RunConfig) -> None:
    write_yaml(out / CONFIG_FILE, config.as_dict())


def _split(config: RunConfig, data_dir: Path) -> tuple[TrainingData, Holdout]:
    """Training window ``1..t_train`` of the dataset and the truth at ``t_train + 1``."""
    if data_dir is None:
        raise InvalidDatasetError("This command needs a dataset directory (--data)")
    dataset = read_dataset(data_dir)
    G = dataset.G
    t_train = G.T - 1 if config.t_train is None else config.t_train
    if not 1 <= t_train < G.T:
        raise InvalidConfigError(
            f"split.t_train={t_train} must satisfy 1 <= t_train < T={G.T} for {data_dir}"
        )
    external = None if dataset.X is None else dataset.X[:t_train]
    data = prepare_training(G.head(t_train), config.features(), external)
    truth = holdout(G, t_train, data.F, dataset.X)
    logging.info(f"Training on t=1..{t_train} of {data_dir} (n={G.n}, q={data.q}, d={data.d})")
    return data, truth


def write_model(out: Path, state: ModelState) -> None:
    """``W.tsv`` holds one row of ``d * q`` values per node; ``S.tsv`` the n x n estimate."""
    n, d, q = state.W.shape
    write_matrix(out / "W.tsv", state.W.reshape(n, d * q))
    write_matrix(out / "S.tsv", state.S)
    write_yaml(out / "model.yaml", {"n": n, "d": d, "q": q})


def _report_row(method: str, errors) -> dict:
    return {"method": method, "feature_error": errors.feature, "graph_error": errors.graph}


@log_execution
def cmd_generate(config: RunConfig, out: Path, data: Optional[Path] = None) -> Path:
    cfg = config.generator()
    G, _ = generate(cfg)
    meta = cfg.as_dict()
    meta.update({"rng": RNG_ALGORITHM, "seed": cfg.seed, "q": config.features().q})
    write_dataset(out, G, meta)
    _write_config(out, config)
    logging.info(f"Wrote {G.T} snapshots of a {G.n}-node graph to {out}")
    return out


def _fit_sweep(config: RunConfig, out: Path, data: TrainingData, truth: Holdout) -> Path:
    h, cfg = config.hyperparameters(), config.optimizer()
    name = config.get("sweep", "parameter", "nu")
    name = "lam" if name == "lambda" else name
    values = config.get("sweep", "values", [])
    mu_cv = config.get("sweep", "mu_cv")
    if name == "nu" and mu_cv is None:
        grid = replace(config.cv_grid(), stage2=False)
        mu_cv = cross_validate(data.G, grid, h, config.features(), cfg).mu_cv
        logging.info(f"Sweeping nu with tau = nu * mu_cv, mu_cv={mu_cv:.4g}")
    rows = sweep_hyperparameter(
        data,
        truth,
        h,
        cfg,
        name,
        values,
        mu_cv=mu_cv,
        max_workers=config.get("table", "max_workers"),
    )
    write_csv(out / "sweep.csv", rows)
    _write_config(out, config)
    return out


@log_execution
def cmd_fit(config: RunConfig, out: Path, data: Optional[Path] = None) -> Path:
    """
    Fit the joint model on the training window and score it on the next step.

    Writes ``W.tsv``, ``S.tsv``, ``model.yaml``, ``trace.csv`` (objective
    terms, gradient norm, step and validation feature error per iterate) and
    ``report.csv``. In sweep mode (``sweep.enabled``) writes ``sweep.csv``.
    """
    training, truth = _split(config, data)
    if config.get("sweep", "enabled", False):
        return _fit_sweep(config, out, training, truth)

    Phi_T = training.Phi[-1]

    def monitor(state: ModelState) -> Optional[float]:
        return relative_error(predict(state.W, Phi_T), truth.X_next, "feature")

    state, trace = fit(
        initial_state(training), training, config.hyperparameters(), config.optimizer(), monitor
    )
    errors = relative_errors(predict(state.W, Phi_T), state.S, truth)

    write_model(out, state)
    write_csv(out / "trace.csv", trace.to_rows())
    row = _report_row("hybrid", errors)
    row.update({"stop_reason": trace.stop_reason, "iterations": trace.records[-1].iteration})
    write_csv(out / "report.csv", [row])
    _write_config(out, config)
    return out


@log_execution
def cmd_baseline(config: RunConfig, out: Path, data: Optional[Path] = None) -> Path:
    """Run each method of ``baseline.methods``; predictions go to ``<method>_X.tsv`` / ``<method>_A.tsv``."""
    training, truth = _split(config, data)
    h, cfg = config.hyperparameters(), config.optimizer()
    rows = []
    for name in config.get("baseline", "methods", BASELINE_METHODS):
        result = MethodFactory.get(name)(training, h, cfg)
        if result.predicted_features is not None:
            write_matrix(out / f"{name}_X.tsv", result.predicted_features)
        if result.predicted_graph is not None:
            write_matrix(out / f"{name}_A.tsv", result.predicted_graph)
        errors = relative_errors(result.predicted_features, result.predicted_graph, truth)
        rows.append(_report_row(name, errors))
    write_csv(out / "report.csv", rows)
    _write_config(out, config)
    return out


@log_execution
def cmd_cv(config: RunConfig, out: Path, data: Optional[Path] = None) -> Path:
    """Cross-validate on the training window only; writes the surfaces and ``selected.yaml``."""
    training, _ = _split(config, data)
    result = cross_validate(
        training.G,
        config.cv_grid(),
        config.hyperparameters(),
        config.features(),
        config.optimizer(),
        max_workers=config.get("table", "max_workers"),
    )
    write_csv(out / "cv_kappa.csv", result.kappa_surface)
    write_csv(out / "cv_mu.csv", result.mu_surface)
    if result.joint_surface:
        write_csv(out / "cv_joint.csv", result.joint_surface)
    selected = result.selected
    write_yaml(
        out / "selected.yaml",
        {
            "kappa": selected.kappa,
            "tau": selected.tau,
            "nu": selected.nu,
            "lambda": selected.lam,
            "eta": selected.eta,
            "kappa_cv": result.kappa_cv,
            "mu_cv": result.mu_cv,
            "validation_times": result.validation_times,
        },
    )
    _write_config(out, config)
    return out


@log_execution
def cmd_table(config: RunConfig, out: Path, data: Optional[Path] = None) -> Path:
    """Bootstrap comparison of the methods over fresh synthetic sequences."""
    table = bootstrap_table(
        methods=config.get("table", "methods"),
        generator=config.generator(),
        replications=int(config.get("table", "replications")),
        h=config.hyperparameters(),
        cfg=config.optimizer(),
        features=config.features(),
        t_train=config.t_train,
        max_workers=config.get("table", "max_workers"),
    )
    write_csv(out / "table.csv", table.rows())
    write_csv(out / "records.csv", table.record_rows())
    _write_config(out, config)
    return out


@log_execution
def cmd_sweep(config: RunConfig, out: Path, data: Optional[Path] = None) -> Path:
    """Held-out errors over the (epsilon, lambda) grid, ``sweep.seeds`` generator seeds per cell."""
    generator = config.generator()
    seeds = [generator.seed + k for k in range(int(config.get("sweep", "seeds", 10)))]
    rows, summary = lambda_epsilon_grid(
        generator,
        lambdas=config.get("sweep", "lambdas"),
        epsilons=config.get("sweep", "epsilons"),
        seeds=seeds,
        h=config.hyperparameters(),
        cfg=config.optimizer(),
        features=config.features(),
        t_train=config.t_train,
        max_workers=config.get("table", "max_workers"),
    )
    write_csv(out / "sweep.csv", rows)
    write_csv(out / "sweep_summary.csv", summary)
    _write_config(out, config)
    return out


COMMANDS = {
    "generate": cmd_generate,
    "fit": cmd_fit,
    "baseline": cmd_baseline,
    "cv": cmd_cv,
    "table": cmd_table,
    "sweep": cmd_sweep,
}

