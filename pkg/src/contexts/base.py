import os
from pathlib import Path
from typing import Optional

import yaml

from src.exceptions import InvalidConfigError

CONFIG_DIR = Path(__file__).resolve().parent.parent / "config"
ENVIRONMENT_VARIABLE = "DYNGRAPH_ENV"


def get_environment() -> str:
    """
    Retrieves the name of the experiment-defaults file to use.

    The name comes from the ``DYNGRAPH_ENV`` environment variable and falls
    back to ``default``; ``src/config/<name>.yaml`` must exist.

    Returns:
        str: The environment name.
    """
    return os.environ.get(ENVIRONMENT_VARIABLE, "default")


def default_config_path() -> Path:
    return CONFIG_DIR / f"{get_environment()}.yaml"


APP_CONFIG_FILE_PATH = CONFIG_DIR / "app.yaml"


def load_config(file_path: Optional[Path] = None) -> dict:
    """Loads yaml configuration file.

    Args:
        file_path (Optional[pathlib.Path], optional): Path to the config file
            to load. Defaults to the environment's experiment defaults.

    Returns:
        dict: The loaded yaml configuration.
    """
    if file_path is None:
        file_path = default_config_path()
    try:
        with open(file_path) as f:
            return yaml.safe_load(f) or {}

    except yaml.YAMLError as err:
        raise InvalidConfigError(f"Error loading config file {file_path}: {err}")

    except FileNotFoundError as err:
        raise InvalidConfigError(f"Config file not found: {err}")


def deep_merge(base: dict, override: dict) -> dict:
    """Recursively merge ``override`` into a copy of ``base``."""
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged
