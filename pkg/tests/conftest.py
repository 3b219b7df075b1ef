"""Shared test fixtures and data loading for witness-lab.

All test data lives in data/fixtures/ as JSON files. This module loads
that data and exposes helper functions + pytest fixtures for the tests.

Small instance: dim S = 8, window [0.25, 0.75], L = 16 (inner limits [6, 10]).
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

# ---------------------------------------------------------------------------
# Paths
# ---------------------------------------------------------------------------
FIXTURES_DIR = Path(__file__).resolve().parent.parent / "data" / "fixtures"
SCENARIOS_DIR = FIXTURES_DIR / "scenarios"
CONFIGS_DIR = FIXTURES_DIR / "configs"


# ---------------------------------------------------------------------------
# Data loaders
# ---------------------------------------------------------------------------
def _load_json(path: Path):
    with open(path) as f:
        return json.load(f)


_reference = _load_json(FIXTURES_DIR / "reference.json")


# ---------------------------------------------------------------------------
# Reference constants derived from reference.json
# ---------------------------------------------------------------------------
SEEDS: list[int] = _reference["seeds"]
TOL: dict[str, float] = _reference["tolerances"]
SMALL = _reference["small_instance"]


def load_scenarios(name: str):
    """Load a scenario file from data/fixtures/scenarios/{name}.json."""
    return _load_json(SCENARIOS_DIR / f"{name}.json")


# ---------------------------------------------------------------------------
# Factories (importable by test modules)
# ---------------------------------------------------------------------------
def make_hamiltonian(spectrum=None, basis: str = "identity", seed: int = 0):
    """Hamiltonian with the given eigenvalues (the small instance by default)."""
    from witness_lab.hamiltonian import from_spectrum

    values = SMALL["spectrum"] if spectrum is None else spectrum
    return from_spectrum(values, basis, seed if basis == "random" else None)


def make_window(e0: float | None = None, delta: float | None = None, delta_rmt: float | None = None):
    from witness_lab.hamiltonian import EnergyWindow

    return EnergyWindow(
        SMALL["e0"] if e0 is None else e0,
        SMALL["delta"] if delta is None else delta,
        delta_rmt,
    )


def make_qpe(L: int | None = None, window=None):
    """QpeConfig for a window (the small instance's by default)."""
    from witness_lab.qpe import QpeConfig

    return QpeConfig.for_window(window or make_window(), SMALL["L"] if L is None else L)


def make_params(D: int = 4, m: int = 8, f: float = 0.6, **kwargs):
    from witness_lab.ensemble import make_params as build

    return build(D, m, f, **kwargs)


def make_explicit_params(f_matrix, f: float, m: int = 1):
    """EthParams with the given amplitude matrix and zero diagonals."""
    from witness_lab.ensemble import EthParams

    fm = np.asarray(f_matrix, dtype=float)
    D = fm.shape[0]
    return EthParams(D, m, f, fm, np.zeros((m, D)))


def random_input(dim: int, seed: int = 0):
    """Normalised random state on S1 (x) S2."""
    from witness_lab.linalg import Statevector

    rng = np.random.default_rng(seed)
    v = rng.standard_normal(dim * dim) + 1j * rng.standard_normal(dim * dim)
    return Statevector((("S1", dim), ("S2", dim)), v / np.linalg.norm(v))


def circuit_setup(epsilon: float = 0.1, m: int | None = None, seed: int = 0, basis: str = "random"):
    """(H, window, observables, ProtocolConfig) for the small circuit-mode instance."""
    from witness_lab.ensemble import build_observables, circuit_params
    from witness_lab.protocol import ProtocolConfig

    m = SMALL["m"] if m is None else m
    H = make_hamiltonian(basis=basis, seed=seed)
    window = make_window()
    observables = build_observables(circuit_params(m), H, window, "circuit", seed)
    config = ProtocolConfig(epsilon, "circuit", make_qpe(window=window), m)
    return H, window, observables, config


def make_oracle(N: int, indices):
    """Reflection oracle on the span of the given standard basis vectors."""
    from witness_lab.oracles import SubspaceOracle

    return SubspaceOracle.from_basis(np.eye(N, dtype=np.complex128)[:, list(indices)])


def unit(vector) -> np.ndarray:
    v = np.asarray(vector, dtype=np.complex128)
    return v / np.linalg.norm(v)


# ---------------------------------------------------------------------------
# pytest fixtures
# ---------------------------------------------------------------------------
@pytest.fixture
def small_hamiltonian():
    return make_hamiltonian()


@pytest.fixture
def small_window():
    return make_window()


@pytest.fixture
def small_qpe():
    return make_qpe()


@pytest.fixture
def ledger():
    from witness_lab.types import ClaimLedger

    return ClaimLedger()
