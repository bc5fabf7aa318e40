"""
Text outputs: CSV tables, dense TSV matrices and YAML documents.

Floats are written with 17 significant digits so ``read(write(x)) == x``.
Every file is written to a temporary sibling and renamed into place.
"""

import io
import os
import tempfile
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd
import yaml

from src.exceptions import InvalidDatasetError
from src.exceptions import OutputPathError

FLOAT_FORMAT = "%.17g"


def atomic_write_text(path: Path, text: str) -> Path:
    """Write ``text`` to a temporary file in the target directory, then rename."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
        with os.fdopen(fd, "w", newline="") as f:
            f.write(text)
        os.replace(tmp, path)
    except OSError as err:
        raise OutputPathError(f"Cannot write '{path}': {err}") from err
    return path


def write_csv(path: Path, rows: list[dict], columns: Optional[list[str]] = None) -> Path:
    if columns is None:
        columns = []
        for row in rows:
            columns.extend(key for key in row if key not in columns)
    buffer = io.StringIO()
    pd.DataFrame(rows, columns=columns).to_csv(
        buffer, index=False, float_format=FLOAT_FORMAT, lineterminator="\n"
    )
    return atomic_write_text(path, buffer.getvalue())


def read_csv(path: Path) -> list[dict]:
    """Rows as dicts; empty cells come back as None."""
    try:
        frame = pd.read_csv(path, float_precision="round_trip")
    except (OSError, pd.errors.EmptyDataError, pd.errors.ParserError) as err:
        raise InvalidDatasetError(f"Cannot read table '{path}': {err}") from err
    return [
        {key: None if pd.isna(value) else value for key, value in row.items()}
        for row in frame.to_dict("records")
    ]


def write_matrix(path: Path, M: np.ndarray) -> Path:
    buffer = io.StringIO()
    np.savetxt(buffer, np.atleast_2d(M), fmt=FLOAT_FORMAT, delimiter="\t")
    return atomic_write_text(path, buffer.getvalue())


def read_matrix(path: Path) -> np.ndarray:
    try:
        return np.loadtxt(path, dtype=np.float64, delimiter="\t", ndmin=2)
    except (OSError, ValueError) as err:
        raise InvalidDatasetError(f"Cannot read matrix '{path}': {err}") from err


def write_yaml(path: Path, document: dict) -> Path:
    return atomic_write_text(path, yaml.safe_dump(document, sort_keys=True))


def read_yaml(path: Path) -> dict:
    try:
        with open(path) as f:
            return yaml.safe_load(f) or {}
    except (OSError, yaml.YAMLError) as err:
        raise InvalidDatasetError(f"Cannot read '{path}': {err}") from err
