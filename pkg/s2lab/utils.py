import logging
from pathlib import Path as FilePath
from typing import Optional, Union

import numpy as np
import pandas as pd

from .exceptions import InputError
from .generators import FeatureMatrix
from .graph_core import Graph, Labeling

logger = logging.getLogger(__name__)

PathLike = Union[str, FilePath]


def _content_lines(text: str):
    """Non-blank lines that are not '#' comments, with their 1-based line numbers."""
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if line and not line.startswith("#"):
            yield number, line


def _ints(line: str, number: int, count: int) -> list[int]:
    parts = line.split()
    if len(parts) != count:
        raise InputError(f"Line {number}: expected {count} integers, got {line!r}")
    try:
        return [int(part) for part in parts]
    except ValueError:
        raise InputError(f"Line {number}: expected integers, got {line!r}")


def parse_edge_list(text: str) -> Graph:
    """
    Parse the edge-list format: a header line 'n m' followed by m lines 'u v'.
    Blank lines and '#' comments are ignored.
    """
    lines = list(_content_lines(text))
    if not lines:
        raise InputError("Edge list is empty; expected a header line 'n m'")
    number, header = lines[0]
    n, m = _ints(header, number, 2)
    body = lines[1:]
    if len(body) != m:
        raise InputError(f"Header announces {m} edges but {len(body)} edge lines follow")
    return Graph.from_edges(n, (_ints(line, number, 2) for number, line in body))


def parse_labels(text: str, n: int) -> Labeling:
    """Parse 'v label' lines (label +1/-1) into a labeling over n vertices."""
    values = {}
    for number, line in _content_lines(text):
        v, label = _ints(line, number, 2)
        if v in values:
            raise InputError(f"Line {number}: vertex {v} labeled twice")
        values[v] = label
    return Labeling(n, values)


def read_text(path: PathLike) -> str:
    try:
        return FilePath(path).read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"Cannot read {path}: {e}")


def load_graph(path: PathLike) -> Graph:
    return parse_edge_list(read_text(path))


def load_labels(path: PathLike, n: int) -> Labeling:
    return parse_labels(read_text(path), n)


def read_features(path: PathLike, class_column: bool = False) -> FeatureMatrix:
    """
    Read comma-separated real features, one row per item. A non-numeric first row
    is treated as a header; with class_column the last column holds integer classes.
    """
    try:
        frame = pd.read_csv(path, header=None, comment="#", skip_blank_lines=True)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise InputError(f"Cannot read feature file {path}: {e}")
    numeric = frame.apply(pd.to_numeric, errors="coerce")
    if len(numeric) and numeric.iloc[0].isna().any():
        numeric = numeric.iloc[1:]
    if numeric.isna().any().any():
        raise InputError(f"Feature file {path} has non-numeric entries")
    values = numeric.to_numpy(dtype=float)
    classes: Optional[np.ndarray] = None
    if class_column:
        if values.shape[1] < 2:
            raise InputError("A class column needs at least one feature column before it")
        classes = values[:, -1].astype(int)
        values = values[:, :-1]
    logger.info(f"Read {values.shape[0]} feature rows with {values.shape[1]} columns from {path}")
    return FeatureMatrix(values=values, classes=classes)


def trial_seeds(base_seed: int, trials: int) -> list[tuple[int, int]]:
    """Independent (oracle seed, run seed) pairs per trial, derived from one base seed."""
    if trials < 1:
        raise InputError(f"trials must be at least 1, got {trials}")
    children = np.random.SeedSequence(base_seed).spawn(trials)
    return [tuple(int(x) for x in child.generate_state(2, dtype=np.uint64)) for child in children]


def parse_budget(value: Union[str, int, None]) -> Union[int, str, None]:
    """'auto', None, or a positive integer."""
    if value is None or value == "auto":
        return value
    try:
        budget = int(value)
    except (TypeError, ValueError):
        raise InputError(f"Budget must be a positive integer or 'auto', got {value!r}")
    if budget < 1:
        raise InputError(f"Budget must be a positive integer or 'auto', got {value!r}")
    return budget
