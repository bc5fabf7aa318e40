"""
Dataset directory layout::

    meta        YAML: n, T, q, monotone, rng, seed (+ generator settings)
    A_<t>.tsv   sparse triplets ``i<TAB>j<TAB>weight``, 0-based, i <= j, t = 1..T
    X_<t>.tsv   optional dense feature rows when features are external
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from src.exceptions import InvalidDatasetError
from src.formats.tables import FLOAT_FORMAT
from src.formats.tables import atomic_write_text
from src.formats.tables import read_matrix
from src.formats.tables import read_yaml
from src.formats.tables import write_matrix
from src.formats.tables import write_yaml
from src.graphs.sequence import GraphSequence

META_FILE = "meta"


@dataclass
class Dataset:
    G: GraphSequence
    meta: dict
    X: Optional[np.ndarray] = None


def snapshot_to_triplets(A: np.ndarray) -> str:
    rows, cols = np.nonzero(np.triu(A))
    lines = [
        f"{i}\t{j}\t{FLOAT_FORMAT % A[i, j]}" for i, j in zip(rows.tolist(), cols.tolist())
    ]
    return "\n".join(lines) + ("\n" if lines else "")


def triplets_to_snapshot(path: Path, n: int) -> np.ndarray:
    A = np.zeros((n, n))
    try:
        with open(path) as f:
            for number, line in enumerate(f, start=1):
                if not line.strip():
                    continue
                i_text, j_text, weight_text = line.rstrip("\n").split("\t")
                i, j, weight = int(i_text), int(j_text), float(weight_text)
                if not (0 <= i <= j < n):
                    raise InvalidDatasetError(
                        f"{path.name}:{number}: index pair ({i}, {j}) invalid for n={n} "
                        "(expected 0 <= i <= j < n)"
                    )
                A[i, j] = A[j, i] = weight
    except OSError as err:
        raise InvalidDatasetError(f"Cannot read snapshot '{path}': {err}") from err
    except ValueError as err:
        raise InvalidDatasetError(f"{path.name}: malformed triplet line: {err}") from err
    return A


def write_dataset(
    directory: Path,
    G: GraphSequence,
    meta: dict,
    X: Optional[np.ndarray] = None,
) -> Path:
    directory = Path(directory)
    document = dict(meta)
    document.update({"n": G.n, "T": G.T, "monotone": bool(G.monotone)})
    if X is not None:
        document["q"] = int(X.shape[2])
    write_yaml(directory / META_FILE, document)
    for t in range(G.T):
        atomic_write_text(directory / f"A_{t + 1}.tsv", snapshot_to_triplets(G[t]))
        if X is not None:
            write_matrix(directory / f"X_{t + 1}.tsv", X[t])
    return directory


def read_dataset(directory: Path) -> Dataset:
    """
    Load a dataset directory and validate the graph invariants.

    Raises:
        InvalidDatasetError: missing files or malformed content, naming the file.
        InvalidGraphError: symmetry, sign or monotonicity violations.
    """
    directory = Path(directory)
    if not (directory / META_FILE).is_file():
        raise InvalidDatasetError(f"Dataset '{directory}' has no '{META_FILE}' file")
    meta = read_yaml(directory / META_FILE)
    try:
        n, T = int(meta["n"]), int(meta["T"])
    except (KeyError, TypeError, ValueError) as err:
        raise InvalidDatasetError(f"{directory / META_FILE}: needs integer keys n and T") from err

    snapshots = np.stack(
        [triplets_to_snapshot(directory / f"A_{t}.tsv", n) for t in range(1, T + 1)]
    )
    G = GraphSequence(snapshots, monotone=bool(meta.get("monotone", False)))

    X = None
    if (directory / "X_1.tsv").exists():
        frames = [read_matrix(directory / f"X_{t}.tsv") for t in range(1, T + 1)]
        for t, frame in enumerate(frames, start=1):
            if frame.shape[0] != n:
                raise InvalidDatasetError(
                    f"X_{t}.tsv has {frame.shape[0]} rows but meta declares n={n}"
                )
        X = np.stack(frames)
    return Dataset(G=G, meta=meta, X=X)
