"""Loading experiment configs, spectra and amplitude matrices from disk."""

from __future__ import annotations

import json
from dataclasses import asdict
from pathlib import Path
from typing import Any

import numpy as np

from witness_lab.config import (
    BLOCKS,
    EXPERIMENT_DEFAULTS,
    SELF_CHECK_OVERRIDES,
    ExperimentConfig,
)
from witness_lab.schema import validate_config


def _merge(*layers: dict[str, dict[str, Any]]) -> dict[str, dict[str, Any]]:
    out: dict[str, dict[str, Any]] = {}
    for layer in layers:
        for block, values in layer.items():
            out.setdefault(block, {}).update(values)
    return out


def _freeze(value: Any) -> Any:
    return tuple(value) if isinstance(value, list) else value


def build_config(
    data: dict[str, Any], *, self_check: bool = False, base_dir: Path | None = None
) -> ExperimentConfig:
    """Merge a validated config dict over its experiment defaults.

    Raises ValueError listing every problem, including cross-field
    constraints that only show once defaults are filled in.
    """
    errors = validate_config(data)
    if errors:
        raise ValueError("Validation errors:\n" + "\n".join(f"  - {e}" for e in errors))
    name = data["experiment"]
    layers = [EXPERIMENT_DEFAULTS[name]]
    if self_check:
        layers.append(SELF_CHECK_OVERRIDES[name])
    layers.append({b: data[b] for b in BLOCKS if b in data})
    merged = _merge(*layers)

    full = {"experiment": name, "seed": data["seed"]}
    for block, cls in BLOCKS.items():
        values = {k: _freeze(v) for k, v in merged.get(block, {}).items()}
        full[block] = {**asdict(cls()), **values}
    errors = validate_config(full)
    if errors:
        listing = "\n".join(f"  - {e}" for e in errors)
        raise ValueError("Validation errors after applying defaults:\n" + listing)

    blocks = {block: cls(**full[block]) for block, cls in BLOCKS.items()}
    return ExperimentConfig(
        experiment=name,
        seed=data["seed"],
        output_dir=data.get("output_dir"),
        workers=data.get("workers", 1),
        base_dir=base_dir or Path("."),
        **blocks,
    )


def load_experiment_config(
    path: str | Path, *, seed: int | None = None, self_check: bool = False
) -> ExperimentConfig:
    """Load an ExperimentConfig from a JSON file.

    ``seed`` overrides the seed in the file. Relative data file paths in the
    config resolve against the file's directory.

    Raises ValueError if the file is not valid JSON or validation fails.
    """
    path = Path(path)
    with open(path) as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise ValueError(f"{path.name} is not valid JSON: {e}") from e
    if isinstance(data, dict) and seed is not None:
        data = {**data, "seed": seed}
    try:
        return build_config(data, self_check=self_check, base_dir=path.parent)
    except ValueError as e:
        raise ValueError(f"{path.name}: {e}") from e


def default_config(experiment: str, seed: int, *, self_check: bool = False) -> ExperimentConfig:
    """The configuration an experiment runs with when nothing is overridden."""
    return build_config({"experiment": experiment, "seed": seed}, self_check=self_check)


def _resolve(path: str | Path, base_dir: Path | None) -> Path:
    p = Path(path)
    return p if p.is_absolute() or base_dir is None else base_dir / p


def load_spectrum(path: str | Path, base_dir: Path | None = None) -> np.ndarray:
    """Eigenvalues from a whitespace-separated text file, one or more per line; '#' starts a comment."""
    values = np.atleast_1d(np.loadtxt(_resolve(path, base_dir), dtype=float, comments="#")).reshape(-1)
    if values.size == 0:
        raise ValueError(f"{Path(path).name}: no eigenvalues")
    if not np.all(np.isfinite(values)):
        raise ValueError(f"{Path(path).name}: eigenvalues must be finite")
    return values


def load_f_matrix(path: str | Path, D: int, base_dir: Path | None = None) -> np.ndarray:
    """A D x D amplitude matrix from a whitespace-separated text file.

    Raises ValueError on a shape mismatch; symmetry and range are checked
    when the ensemble is built.
    """
    matrix = np.atleast_2d(np.loadtxt(_resolve(path, base_dir), dtype=float, comments="#"))
    if matrix.shape != (D, D):
        raise ValueError(f"{Path(path).name}: f_matrix has shape {matrix.shape}, expected {(D, D)}")
    return matrix
