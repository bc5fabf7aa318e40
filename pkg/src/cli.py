"""
Command-line entry point.

    dyngraph generate --out data/ --n 100 --T 60 --seed 7
    dyngraph fit      --data data/ --out fit/ --lambda 0.01
    dyngraph baseline --data data/ --out base/ --mu 0
    dyngraph cv       --data data/ --out cv/
    dyngraph table    --out table/ --replications 50
    dyngraph sweep    --out sweep/ --lambdas 0 0.001 0.01

On failure a single line ``error=<ClassName> code=<exit code> message=<text>``
goes to stderr and the process exits with the error's code.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional

from src.commands import COMMANDS
from src.contexts.base import deep_merge
from src.contexts.run import RunConfig
from src.contexts.run import load_app_config
from src.decorators import timer
from src.exceptions import InvalidConfigError
from src.exceptions import exit_code_for
from src.exceptions import handle_exception
from src.pipeline.log import RunLogHandler

# argparse dest -> (config section, key); None section means top level
FLAG_MAP = {
    "seed": (None, "seed"),
    "n": ("generator", "n"),
    "r": ("generator", "r"),
    "T": ("generator", "T"),
    "delta": ("generator", "delta"),
    "sigma_noise": ("generator", "sigma_noise"),
    "epsilon": ("generator", "epsilon"),
    "sigma1": ("generator", "sigma1"),
    "sigma2": ("generator", "sigma2"),
    "monotone": ("generator", "monotone"),
    "symmetrize": ("generator", "symmetrize"),
    "symmetric_drift": ("generator", "symmetric_drift"),
    "k_eig": ("features", "k_eig"),
    "k_clusters": ("features", "k_clusters"),
    "kmeans_restarts": ("features", "kmeans_restarts"),
    "kappa": ("hyperparameters", "kappa"),
    "tau": ("hyperparameters", "tau"),
    "nu": ("hyperparameters", "nu"),
    "lam": ("hyperparameters", "lambda"),
    "eta": ("hyperparameters", "eta"),
    "step_size": ("optimizer", "step_size"),
    "max_iters": ("optimizer", "max_iters"),
    "grad_tolerance": ("optimizer", "grad_tolerance"),
    "t_train": ("split", "t_train"),
    "kappa_grid": ("cv", "kappa"),
    "mu_grid": ("cv", "mu"),
    "nu_grid": ("cv", "nu"),
    "lambda_grid": ("cv", "lambda"),
    "selection": ("cv", "selection"),
    "stage2": ("cv", "stage2"),
    "baseline_methods": ("baseline", "methods"),
    "methods": ("table", "methods"),
    "replications": ("table", "replications"),
    "max_workers": ("table", "max_workers"),
    "sweep": ("sweep", "enabled"),
    "sweep_parameter": ("sweep", "parameter"),
    "sweep_values": ("sweep", "values"),
    "mu_cv": ("sweep", "mu_cv"),
    "lambdas": ("sweep", "lambdas"),
    "epsilons": ("sweep", "epsilons"),
    "seeds": ("sweep", "seeds"),
}


def _common(parser: argparse.ArgumentParser, needs_data: bool) -> None:
    parser.add_argument("--out", type=Path, required=True, help="output directory")
    parser.add_argument("--config", type=Path, help="YAML file merged over the defaults")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--run-log", help="DuckDB file of the run registry (':memory:' to skip)")
    if needs_data:
        parser.add_argument("--data", type=Path, required=True, help="dataset directory")


def _generator_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("generator")
    group.add_argument("--n", type=int)
    group.add_argument("--r", type=int)
    group.add_argument("--T", type=int)
    group.add_argument("--delta", type=float)
    group.add_argument("--sigma-noise", type=float)
    group.add_argument("--epsilon", type=float)
    group.add_argument("--sigma1", type=float)
    group.add_argument("--sigma2", type=float)
    group.add_argument("--monotone", action=argparse.BooleanOptionalAction)
    group.add_argument("--symmetrize", action=argparse.BooleanOptionalAction)
    group.add_argument("--symmetric-drift", action=argparse.BooleanOptionalAction)


def _model_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("model")
    group.add_argument("--k-eig", type=int)
    group.add_argument("--k-clusters", type=int)
    group.add_argument("--kmeans-restarts", type=int)
    group.add_argument("--kappa", type=float)
    group.add_argument("--tau", type=float)
    group.add_argument("--nu", type=float)
    group.add_argument("--lambda", dest="lam", type=float)
    group.add_argument("--eta", type=float)
    group.add_argument("--mu", type=float, help="sets tau = nu * mu")
    group.add_argument("--step-size", type=float)
    group.add_argument("--max-iters", type=int)
    group.add_argument("--grad-tolerance", type=float)
    group.add_argument("--t-train", type=int)
    group.add_argument("--max-workers", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dyngraph",
        description="Joint prediction of node features and the next graph of a dynamic graph.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    generate = commands.add_parser("generate", help="write a synthetic graph sequence")
    _common(generate, needs_data=False)
    _generator_flags(generate)

    fit = commands.add_parser("fit", help="fit the joint model and score the next step")
    _common(fit, needs_data=True)
    _model_flags(fit)
    fit.add_argument("--sweep", action="store_true", default=None, help="sweep one hyperparameter")
    fit.add_argument("--sweep-parameter", choices=["kappa", "tau", "nu", "lambda", "eta"])
    fit.add_argument("--sweep-values", type=float, nargs="+")
    fit.add_argument("--mu-cv", type=float)

    baseline = commands.add_parser("baseline", help="run the single-task baselines")
    _common(baseline, needs_data=True)
    _model_flags(baseline)
    baseline.add_argument("--methods", dest="baseline_methods", nargs="+")

    cv = commands.add_parser("cv", help="two-stage temporal cross-validation")
    _common(cv, needs_data=True)
    _model_flags(cv)
    cv.add_argument("--kappa-grid", type=float, nargs="+")
    cv.add_argument("--mu-grid", type=float, nargs="+")
    cv.add_argument("--nu-grid", type=float, nargs="+")
    cv.add_argument("--lambda-grid", type=float, nargs="+")
    cv.add_argument("--selection", choices=["feature", "graph", "sum"])
    cv.add_argument("--stage2", action=argparse.BooleanOptionalAction)

    table = commands.add_parser("table", help="bootstrap comparison of all methods")
    _common(table, needs_data=False)
    _generator_flags(table)
    _model_flags(table)
    table.add_argument("--methods", nargs="+")
    table.add_argument("--replications", type=int)

    sweep = commands.add_parser("sweep", help="lambda x epsilon accuracy grid")
    _common(sweep, needs_data=False)
    _generator_flags(sweep)
    _model_flags(sweep)
    sweep.add_argument("--lambdas", type=float, nargs="+")
    sweep.add_argument("--epsilons", type=float, nargs="+")
    sweep.add_argument("--seeds", type=int, help="generator seeds per grid cell")
    return parser


def overrides_from(args: argparse.Namespace) -> dict:
    """Turn the flags that were actually given into a nested config mapping."""
    overrides: dict = {"command": args.command}
    for dest, (section, key) in FLAG_MAP.items():
        value = getattr(args, dest, None)
        if value is None:
            continue
        if section is None:
            overrides[key] = value
        else:
            overrides.setdefault(section, {})[key] = value
    return overrides


def resolve_config(args: argparse.Namespace) -> RunConfig:
    config = RunConfig.resolve(args.config, overrides_from(args))
    mu = getattr(args, "mu", None)
    if mu is not None:
        nu = config.hyperparameters().nu
        if nu <= 0:
            raise InvalidConfigError("--mu needs nu > 0 (tau = nu * mu)")
        hyperparameters = config.section("hyperparameters")
        hyperparameters["tau"] = nu * mu
        config = RunConfig(raw=deep_merge(config.raw, {"hyperparameters": hyperparameters}))
        config.validate()
    return config


def _configure_logging(app_config: dict) -> None:
    level = app_config.get("logging", {}).get("level", "INFO")
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(message)s")


def _error_line(error: BaseException) -> str:
    message = " ".join(str(error).split())
    return f"error={type(error).__name__} code={exit_code_for(error)} message={message}"


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    app_config = load_app_config()
    _configure_logging(app_config)
    if args.run_log is not None:
        app_config = deep_merge(app_config, {"logging": {"run_log": {"db_file": args.run_log}}})

    run_log = None
    try:
        run_log = RunLogHandler.from_config(app_config)
        config = resolve_config(args)
        run_log.create(args.command, config.as_dict(), str(args.out))
        run_log.start()
        command = timer(COMMANDS[args.command])
        _, duration = command(config, args.out, getattr(args, "data", None))
        run_log.success(duration)
        return 0
    except Exception as err:
        handle_exception(err, f"Command '{args.command}' failed", quiet=True)
        if run_log is not None and run_log.run_id:
            run_log.failed(str(err))
        print(_error_line(err), file=sys.stderr)
        return exit_code_for(err)
    finally:
        if run_log is not None:
            run_log.close()


if __name__ == "__main__":
    sys.exit(main())
