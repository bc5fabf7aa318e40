from src.exceptions import InvalidConfigError
from src.methods.base import MethodFactory
from src.model.baselines import BaselineResult
from src.model.baselines import ridge_fit
from src.model.baselines import shrinkage_only
from src.model.data import TrainingData
from src.model.objective import Hyperparameters
from src.model.objective import predict
from src.model.optimizer import OptimizerConfig


@MethodFactory.register("ridge")
def ridge(data: TrainingData, h: Hyperparameters, cfg: OptimizerConfig) -> BaselineResult:
    """Regression only: features as independent time series, no graph."""
    W = ridge_fit(data.Phi, data.X, h.kappa)
    return BaselineResult(method="ridge", predicted_features=predict(W, data.Phi[-1]))


@MethodFactory.register("shrinkage")
def shrinkage(data: TrainingData, h: Hyperparameters, cfg: OptimizerConfig) -> BaselineResult:
    """Graph only: low-rank denoising of the last snapshot with mu = tau / nu."""
    if h.mu is None:
        raise InvalidConfigError("shrinkage needs nu > 0 to define mu = tau / nu")
    return BaselineResult(method="shrinkage", predicted_graph=shrinkage_only(data.A_T, h.mu))
