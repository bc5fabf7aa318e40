"""Replicated comparison of methods on freshly generated synthetic sequences."""

import logging
from dataclasses import dataclass
from dataclasses import field
from dataclasses import replace
from typing import Optional

from src.decorators import threaded
from src.evaluation.metrics import Summary
from src.evaluation.metrics import relative_errors
from src.evaluation.metrics import summarize
from src.exceptions import InvalidParameterError
from src.graphs.features import FeatureConfig
from src.methods.base import MethodFactory
from src.model.data import holdout
from src.model.data import prepare_training
from src.model.objective import Hyperparameters
from src.model.optimizer import OptimizerConfig
from src.synthetic.generator import GeneratorConfig
from src.synthetic.generator import generate


@dataclass(frozen=True)
class ReplicationRecord:
    seed: int
    method: str
    feature_error: Optional[float]
    graph_error: Optional[float]


@dataclass
class BootstrapTable:
    methods: list[str]
    records: list[ReplicationRecord] = field(default_factory=list)

    def summary(self, method: str) -> tuple[Summary, Summary]:
        mine = [r for r in self.records if r.method == method]
        return (
            summarize([r.feature_error for r in mine]),
            summarize([r.graph_error for r in mine]),
        )

    def rows(self) -> list[dict]:
        """One row per method: mean, std and standard error per metric."""
        rows = []
        for method in self.methods:
            feature, graph = self.summary(method)
            rows.append(
                {
                    "method": method,
                    "feature_mean": feature.mean,
                    "feature_std": feature.std,
                    "feature_stderr": feature.stderr,
                    "graph_mean": graph.mean,
                    "graph_std": graph.std,
                    "graph_stderr": graph.stderr,
                    "replications": max(feature.count, graph.count),
                }
            )
        return rows

    def record_rows(self) -> list[dict]:
        return [
            {
                "seed": r.seed,
                "method": r.method,
                "feature_error": r.feature_error,
                "graph_error": r.graph_error,
            }
            for r in self.records
        ]


def run_replication(
    seed: int,
    methods: list[str],
    generator: GeneratorConfig,
    h: Hyperparameters,
    cfg: OptimizerConfig,
    features: FeatureConfig,
    t_train: Optional[int] = None,
) -> list[ReplicationRecord]:
    """Generate one sequence, train on ``1..t_train`` and score ``t_train + 1``."""
    G, _ = generate(replace(generator, seed=seed))
    t_train = G.T - 1 if t_train is None else t_train
    data = prepare_training(G.head(t_train), features)
    truth = holdout(G, t_train, data.F)

    records = []
    for name in methods:
        result = MethodFactory.get(name)(data, h, cfg)
        errors = relative_errors(result.predicted_features, result.predicted_graph, truth)
        records.append(ReplicationRecord(seed, name, errors.feature, errors.graph))
    return records


@threaded()
def _replicate(seed: int, *args, **kwargs) -> list[ReplicationRecord]:
    return run_replication(seed, *args, **kwargs)


def bootstrap_table(
    methods: list[str],
    generator: GeneratorConfig,
    replications: int,
    h: Hyperparameters = Hyperparameters(),
    cfg: OptimizerConfig = OptimizerConfig(),
    features: FeatureConfig = FeatureConfig(),
    seeds: Optional[list[int]] = None,
    t_train: Optional[int] = None,
    max_workers: Optional[int] = None,
) -> BootstrapTable:
    """
    Score every method over independent generator seeds.

    Seeds default to ``generator.seed + k`` for ``k < replications``; every
    method sees the same sequences, so comparisons are paired.
    """
    if replications < 2:
        raise InvalidParameterError(f"replications must be >= 2, got {replications}")
    if seeds is None:
        seeds = [generator.seed + k for k in range(replications)]
    if len(seeds) != replications:
        raise InvalidParameterError(f"Expected {replications} seeds, got {len(seeds)}")
    for name in methods:
        MethodFactory.get(name)

    logging.info(f"Bootstrapping {methods} over {replications} replications")
    per_seed = _replicate(
        seeds, methods, generator, h, cfg, features, t_train, max_workers=max_workers
    )
    table = BootstrapTable(methods=list(methods))
    for records in per_seed:
        table.records.extend(records)
    return table
