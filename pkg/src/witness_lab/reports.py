"""Deterministic JSON and CSV report files.

Reports are pure functions of (config, seed): keys are sorted, floats are
written with ``repr``, and nothing time- or host-dependent goes in.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import math
from collections.abc import Iterable, Mapping, Sequence
from pathlib import Path
from typing import Any

import numpy as np


def to_builtin(value: Any) -> Any:
    """Convert numpy scalars and arrays, dataclasses, tuples and paths to JSON-ready builtins.

    Non-finite floats become the strings "inf", "-inf" and "nan".
    """
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        if hasattr(value, "to_dict"):
            return to_builtin(value.to_dict())
        return to_builtin(dataclasses.asdict(value))
    if isinstance(value, Mapping):
        return {str(k): to_builtin(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_builtin(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_builtin(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": to_builtin(float(value.real)), "im": to_builtin(float(value.imag))}
    if isinstance(value, (float, np.floating)):
        f = float(value)
        if math.isnan(f):
            return "nan"
        if math.isinf(f):
            return "inf" if f > 0 else "-inf"
        return f
    if isinstance(value, Path):
        return value.as_posix()
    return value


def write_json(path: str | Path, data: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(to_builtin(data), sort_keys=True, indent=2)
    path.write_text(text + "\n")
    return path


def write_csv(
    path: str | Path,
    columns: Sequence[str],
    rows: Iterable[Mapping[str, Any]],
    description: str = "",
) -> Path:
    """CSV with a leading '#' line naming the columns, then a header row and one row per mapping."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        header = f"# {description}; columns: " if description else "# columns: "
        f.write(header + ", ".join(columns) + "\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(row.get(c)) for c in columns])
    return path


def _cell(value: Any) -> str:
    value = to_builtin(value)
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)
