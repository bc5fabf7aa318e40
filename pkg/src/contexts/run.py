from dataclasses import dataclass
from pathlib import Path
from typing import Any
from typing import Optional

from src.contexts.base import APP_CONFIG_FILE_PATH
from src.contexts.base import deep_merge
from src.contexts.base import load_config
from src.evaluation.crossval import CvGrid
from src.exceptions import InvalidConfigError
from src.graphs.features import FeatureConfig
from src.model.objective import Hyperparameters
from src.model.optimizer import OptimizerConfig
from src.synthetic.generator import GeneratorConfig

SECTIONS = (
    "generator",
    "features",
    "hyperparameters",
    "optimizer",
    "split",
    "cv",
    "baseline",
    "table",
    "sweep",
)


def _typed(factory, section: dict, name: str, rename: Optional[dict] = None):
    values = dict(section)
    for old, new in (rename or {}).items():
        if old in values:
            values[new] = values.pop(old)
    try:
        return factory(**values)
    except TypeError as err:
        raise InvalidConfigError(f"Invalid keys in config section '{name}': {err}") from err


@dataclass
class RunConfig:
    """
    Fully resolved configuration of one command run.

    ``raw`` is the merged mapping (defaults <- user file <- flags); the typed
    views below are built from it and validate their own fields.
    """

    raw: dict

    @classmethod
    def resolve(
        cls,
        config_file: Optional[Path] = None,
        overrides: Optional[dict] = None,
    ) -> "RunConfig":
        merged = load_config()
        if config_file is not None:
            merged = deep_merge(merged, load_config(Path(config_file)))
        if overrides:
            merged = deep_merge(merged, overrides)
        unknown = set(merged) - set(SECTIONS) - {"seed", "command"}
        if unknown:
            raise InvalidConfigError(f"Unknown config sections: {sorted(unknown)}")
        config = cls(raw=merged)
        config.validate()
        return config

    def section(self, name: str) -> dict:
        return dict(self.raw.get(name) or {})

    @property
    def seed(self) -> int:
        return int(self.raw.get("seed", 0))

    def validate(self) -> None:
        self.generator()
        self.features()
        self.hyperparameters()
        self.optimizer()
        self.cv_grid()

    def generator(self) -> GeneratorConfig:
        section = self.section("generator")
        section.setdefault("seed", self.seed)
        return _typed(GeneratorConfig, section, "generator")

    def features(self) -> FeatureConfig:
        section = self.section("features")
        section.setdefault("seed", self.seed)
        return _typed(FeatureConfig, section, "features")

    def hyperparameters(self) -> Hyperparameters:
        return _typed(Hyperparameters, self.section("hyperparameters"), "hyperparameters", {"lambda": "lam"})

    def optimizer(self) -> OptimizerConfig:
        return _typed(OptimizerConfig, self.section("optimizer"), "optimizer")

    def cv_grid(self) -> CvGrid:
        return _typed(CvGrid, self.section("cv"), "cv", {"lambda": "lam"})

    @property
    def t_train(self) -> Optional[int]:
        return self.section("split").get("t_train")

    def get(self, section: str, key: str, default: Any = None) -> Any:
        return self.section(section).get(key, default)

    def as_dict(self) -> dict:
        return self.raw


def load_app_config() -> dict:
    return load_config(APP_CONFIG_FILE_PATH)
