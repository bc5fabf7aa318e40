from dataclasses import replace

from src.methods.base import MethodFactory
from src.model.baselines import BaselineResult
from src.model.baselines import rank_free_fit
from src.model.data import TrainingData
from src.model.objective import Hyperparameters
from src.model.objective import ModelState
from src.model.objective import initial_state
from src.model.objective import predict
from src.model.optimizer import OptimizerConfig
from src.model.optimizer import Trace
from src.model.optimizer import fit


def _result(name: str, data: TrainingData, state: ModelState, trace: Trace) -> BaselineResult:
    return BaselineResult(
        method=name,
        predicted_features=predict(state.W, data.Phi[-1]),
        predicted_graph=state.S,
        state=state,
        trace=trace,
    )


@MethodFactory.register("hybrid")
def hybrid(data: TrainingData, h: Hyperparameters, cfg: OptimizerConfig) -> BaselineResult:
    state, trace = fit(initial_state(data), data, h, cfg)
    return _result("hybrid", data, state, trace)


@MethodFactory.register("lambda_free")
def lambda_free(data: TrainingData, h: Hyperparameters, cfg: OptimizerConfig) -> BaselineResult:
    """Joint fit without the Laplacian coupling (lambda = 0)."""
    state, trace = fit(initial_state(data), data, replace(h, lam=0.0), cfg)
    return _result("lambda_free", data, state, trace)


@MethodFactory.register("rank_free")
def rank_free(data: TrainingData, h: Hyperparameters, cfg: OptimizerConfig) -> BaselineResult:
    state, trace = rank_free_fit(data, h, cfg)
    return _result("rank_free", data, state, trace)
