"""Input validation for experiment configuration files."""

from __future__ import annotations

from collections.abc import Callable
from typing import Any

from witness_lab.config import BLOCKS, EXPERIMENTS
from witness_lab.rng import MAX_SEED

TOP_LEVEL = ("experiment", "seed", "output_dir", "workers", *BLOCKS)

Check = Callable[[Any], "str | None"]


def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _positive_int(value: Any) -> str | None:
    if not _is_int(value) or value < 1:
        return f"must be a positive integer, got {value!r}"
    return None


def _non_negative_int(value: Any) -> str | None:
    if not _is_int(value) or value < 0:
        return f"must be a non-negative integer, got {value!r}"
    return None


def _number(value: Any) -> str | None:
    if not _is_number(value):
        return f"must be a number, got {value!r}"
    return None


def _positive_number(value: Any) -> str | None:
    if not _is_number(value) or value <= 0:
        return f"must be a positive number, got {value!r}"
    return None


def _non_negative_number(value: Any) -> str | None:
    if not _is_number(value) or value < 0:
        return f"must be a non-negative number, got {value!r}"
    return None


def _amplitude(value: Any) -> str | None:
    if not _is_number(value) or not 0 < value <= 1:
        return f"must satisfy 0 < f <= 1, got {value!r}"
    return None


def _epsilon(value: Any) -> str | None:
    if not _is_number(value) or not 0 <= value <= 0.5:
        return f"must lie in [0, 0.5], got {value!r}"
    return None


def _oracle_epsilon(value: Any) -> str | None:
    if not _is_number(value) or not 0 <= value < 0.5:
        return f"must lie in [0, 0.5), got {value!r}"
    return None


def _probability(value: Any) -> str | None:
    if not _is_number(value) or not 0 < value <= 1:
        return f"must lie in (0, 1], got {value!r}"
    return None


def _optional_string(value: Any) -> str | None:
    if value is not None and not isinstance(value, str):
        return f"must be a string, got {value!r}"
    return None


def _optional_positive_number(value: Any) -> str | None:
    return None if value is None else _positive_number(value)


def _choice(*options: str) -> Check:
    def check(value: Any) -> str | None:
        if value not in options:
            return f"must be one of {', '.join(options)}, got {value!r}"
        return None

    return check


def _list_of(item: Check, *, min_items: int = 1) -> Check:
    def check(value: Any) -> str | None:
        if not isinstance(value, (list, tuple)) or len(value) < min_items:
            return f"must be a list of at least {min_items} item(s), got {value!r}"
        for i, v in enumerate(value):
            error = item(v)
            if error:
                return f"item {i} {error}"
        return None

    return check


def _trial_count(value: Any) -> str | None:
    if not _is_int(value) or value < 20:
        return f"must be an integer of at least 20, got {value!r}"
    return None


FIELD_CHECKS: dict[str, dict[str, Check]] = {
    "ensemble": {
        "D": _positive_int,
        "m": _positive_int,
        "f": _amplitude,
        "f_mode": _choice("uniform", "random", "explicit"),
        "f_matrix_file": _optional_string,
        "mu_mode": _choice("zero", "constant", "jitter"),
        "mu": _number,
    },
    "qpe": {
        "L": _positive_int,
        "L_values": _list_of(_positive_int),
    },
    "window": {
        "e0": _number,
        "delta": _positive_number,
        "delta_rmt": _optional_positive_number,
    },
    "spectrum": {
        "kind": _choice("uniform", "equispaced", "file", "random_local"),
        "count": _positive_int,
        "low": _number,
        "high": _number,
        "file": _optional_string,
        "basis": _choice("identity", "random"),
        "qubits": _positive_int,
        "terms": _non_negative_int,
    },
    "protocol": {
        "epsilon": _epsilon,
        "epsilon_values": _list_of(_epsilon),
        "mode": _choice("direct", "circuit"),
        "m": _positive_int,
        "m_values": _list_of(_positive_int),
        "c": _positive_number,
    },
    "trials": {"count": _positive_int},
    "concentration": {
        "m_values": _list_of(_positive_int),
        "trials": _trial_count,
    },
    "gaussnorm": {
        "D_values": _list_of(_positive_int),
        "samples": _positive_int,
        "variance": _non_negative_number,
    },
    "oracle": {
        "N": _positive_int,
        "k": _positive_int,
        "epsilon_values": _list_of(_oracle_epsilon),
        "instances": _positive_int,
        "k1": _positive_int,
        "k2": _positive_int,
        "a": _probability,
        "b": _probability,
    },
}


def validate_config(data: Any) -> list[str]:
    """Validate a parsed experiment config. Returns list of error messages (empty = valid).

    Checks:
    - Top level is an object with a known experiment and a 64-bit unsigned seed
    - No unknown keys at any level
    - Every block field has the right type and range
    - Cross-field constraints (spectrum low < high, oracle a > b, k < N and k1 < k2 <= N)
    """
    errors: list[str] = []
    if not isinstance(data, dict):
        return [f"Config must be a JSON object, got {type(data).__name__}"]

    for key in data:
        if key not in TOP_LEVEL:
            errors.append(f"Unknown top-level key: {key!r}")

    if "experiment" not in data:
        errors.append("Missing required key 'experiment'")
    elif data["experiment"] not in EXPERIMENTS:
        errors.append(f"Unknown experiment {data['experiment']!r} (expected one of {', '.join(EXPERIMENTS)})")

    if "seed" not in data:
        errors.append("Missing required key 'seed'")
    elif not _is_int(data["seed"]) or not 0 <= data["seed"] <= MAX_SEED:
        errors.append(f"'seed' must be an integer in [0, 2^64 - 1], got {data['seed']!r}")

    if "output_dir" in data:
        error = _optional_string(data["output_dir"])
        if error:
            errors.append(f"'output_dir' {error}")
    if "workers" in data:
        error = _positive_int(data["workers"])
        if error:
            errors.append(f"'workers' {error}")

    for block, checks in FIELD_CHECKS.items():
        if block not in data:
            continue
        values = data[block]
        if not isinstance(values, dict):
            errors.append(f"Block '{block}' must be an object")
            continue
        for key, value in values.items():
            if key not in checks:
                errors.append(f"Block '{block}': unknown key {key!r}")
                continue
            error = checks[key](value)
            if error:
                errors.append(f"Block '{block}', '{key}' {error}")

    errors.extend(_cross_field_errors(data))
    return errors


def _cross_field_errors(data: dict[str, Any]) -> list[str]:
    errors: list[str] = []
    spectrum = data.get("spectrum")
    if isinstance(spectrum, dict):
        low, high = spectrum.get("low"), spectrum.get("high")
        if _is_number(low) and _is_number(high) and low >= high:
            errors.append(f"Block 'spectrum': low ({low}) must be below high ({high})")
        if spectrum.get("kind") == "file" and not spectrum.get("file"):
            errors.append("Block 'spectrum': kind 'file' needs 'file'")
    ensemble = data.get("ensemble")
    explicit = isinstance(ensemble, dict) and ensemble.get("f_mode") == "explicit"
    if explicit and not ensemble.get("f_matrix_file"):
        errors.append("Block 'ensemble': f_mode 'explicit' needs 'f_matrix_file'")
    oracle = data.get("oracle")
    if isinstance(oracle, dict):
        a, b = oracle.get("a"), oracle.get("b")
        if _is_number(a) and _is_number(b) and a <= b:
            errors.append(f"Block 'oracle': a ({a}) must exceed b ({b})")
        k1, k2, N = oracle.get("k1"), oracle.get("k2"), oracle.get("N")
        if _is_int(k1) and _is_int(k2) and k1 >= k2:
            errors.append(f"Block 'oracle': k1 ({k1}) must be below k2 ({k2})")
        if _is_int(k2) and _is_int(N) and k2 > N:
            errors.append(f"Block 'oracle': k2 ({k2}) exceeds N ({N})")
        k = oracle.get("k")
        if _is_int(k) and _is_int(N) and k >= N:
            errors.append(f"Block 'oracle': k ({k}) must be below N ({N})")
    return errors
