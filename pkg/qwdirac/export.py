"""
CSV and JSON writers

CSV files start with one comment line holding the canonical config, then a
header row. Floats use '%.15g' with a dot decimal and '\\n' line endings, so
equal configs give byte-identical files.
"""

import json
import math
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from loguru import logger

from .algebra import format_complex
from .config import RunConfig
from .walk import Histogram

SCHEMA_VERSION = 1
FLOAT_FORMAT = "%.15g"


def config_comment(config: Optional[RunConfig]) -> str:
    if config is None:
        return ""
    body = "; ".join(config.canonical().splitlines())
    return f"# config: command = {config.command}; {body}\n"


def table_text(frame: pd.DataFrame, config: Optional[RunConfig] = None) -> str:
    """CSV text of a frame, preceded by the config comment"""
    csv = frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return config_comment(config) + csv


def _clean(value: Any) -> Any:
    """JSON-safe copy: numpy scalars to Python, non-finite floats to null"""
    if isinstance(value, Mapping):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, complex):
        return format_complex(value)
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def report_text(report: Dict[str, Any], config: Optional[RunConfig] = None) -> str:
    """Versioned JSON document; the config is embedded as key-value pairs"""
    document = {"schema": SCHEMA_VERSION}
    if config is not None:
        document["command"] = config.command
        document["config"] = config.parse_pairs(config.canonical())
    document.update({k: v for k, v in report.items() if k != "schema"})
    return json.dumps(_clean(document), indent=2, sort_keys=False) + "\n"


def write_text(path: Union[str, Path], text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(text)
    logger.info(f"Wrote {path}")
    return path


def coordinate_names(d: int, prefix: str = "x") -> Tuple[str, ...]:
    if d == 1:
        return (prefix,)
    return tuple(f"{prefix}{j + 1}" for j in range(d))


def distribution_frame(distribution: Mapping[Tuple[float, ...], float], d: int, prefix: str = "x") -> pd.DataFrame:
    """Sites (sorted) and their probabilities"""
    names = coordinate_names(d, prefix)
    rows = [tuple(site) + (probability,) for site, probability in sorted(distribution.items())]
    return pd.DataFrame(rows, columns=list(names) + ["probability"])


def histogram_frame(histogram: Histogram, extra: Optional[Mapping[str, np.ndarray]] = None) -> pd.DataFrame:
    """Bin centres, masses and densities; extra columns are given on the bin grid"""
    d = len(histogram.edges)
    centers = np.meshgrid(*histogram.centers, indexing="ij")
    columns = {name: c.ravel() for name, c in zip(coordinate_names(d, "v"), centers)}
    columns["mass"] = histogram.masses.ravel()
    columns["density"] = histogram.densities().ravel()
    for name, values in (extra or {}).items():
        columns[name] = np.asarray(values).ravel()
    return pd.DataFrame(columns)


def grid_frame(axes: Sequence[np.ndarray], values: Mapping[str, np.ndarray], prefix: str = "v") -> pd.DataFrame:
    """Tabulation on the tensor grid of `axes`, first axis slowest"""
    mesh = np.meshgrid(*axes, indexing="ij")
    columns = {name: m.ravel() for name, m in zip(coordinate_names(len(axes), prefix), mesh)}
    for name, column in values.items():
        columns[name] = np.asarray(column).ravel()
    return pd.DataFrame(columns)


__all__ = [
    "SCHEMA_VERSION",
    "FLOAT_FORMAT",
    "config_comment",
    "table_text",
    "report_text",
    "write_text",
    "coordinate_names",
    "distribution_frame",
    "histogram_frame",
    "grid_frame",
]
