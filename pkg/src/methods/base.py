import logging
from typing import Callable
from typing import NoReturn
from typing import Protocol

from src.exceptions import MethodNotFound
from src.model.baselines import BaselineResult
from src.model.data import TrainingData
from src.model.objective import Hyperparameters
from src.model.optimizer import OptimizerConfig

TABLE_METHODS = ["hybrid", "lambda_free", "rank_free", "ridge", "shrinkage"]


class Method(Protocol):
    def __call__(
        self,
        data: TrainingData,
        h: Hyperparameters,
        cfg: OptimizerConfig,
    ) -> BaselineResult: ...


class MethodFactory:
    """
    Registry of prediction methods compared in the evaluation table.
    """

    registry: dict[str, Method] = {}
    """ Internal registry for available methods """

    @classmethod
    def register(cls, name: str) -> Callable:
        """Class method to register a method under ``name``.

        Args:
            name (str): The name of the method.

        Returns:
            The decorator that registers and returns the callable unchanged.
        """

        def inner_wrapper(wrapped: Method) -> Method:
            if name in cls.registry:
                logging.warning(f"Method '{name}' already exists. Will replace it")
            cls.registry[name] = wrapped
            return wrapped

        return inner_wrapper

    @classmethod
    def get(cls, name: str) -> Method | NoReturn:
        """
        Look up a registered method.

        Raises:
            MethodNotFound: when ``name`` was never registered.
        """
        if name not in cls.registry:
            raise MethodNotFound(
                f"Method '{name}' does not exist in the registry; "
                f"available: {sorted(cls.registry)}"
            )
        return cls.registry[name]

    @classmethod
    def names(cls) -> list[str]:
        return sorted(cls.registry)
