"""witness-lab: numerical checks for unique-witness energy subspace tests on ETH Hamiltonians."""

from witness_lab.ensemble import EthParams, build_observables, make_params
from witness_lab.experiments import ExperimentResult, run_experiment
from witness_lab.grid import EnergyGrid
from witness_lab.hamiltonian import EnergyWindow, Hamiltonian, from_spectrum, random_local, window_projector
from witness_lab.loaders import default_config, load_experiment_config
from witness_lab.oracles import SubspaceOracle, overlap_bound_check, qxc_dimension_count, simple_verifier
from witness_lab.protocol import ProtocolConfig, build_M, build_O_succ, evaluate, no_case_norm, unique_witness
from witness_lab.qpe import QpeConfig, q_weights, sinc_L
from witness_lab.spectral import concentration_experiment, gaussian_norm_experiment, perron_check
from witness_lab.types import (
    AcceptanceReport,
    ClaimLedger,
    ContractViolation,
    DimensionCapError,
    PreconditionError,
    TheoremViolation,
    Violation,
)

__all__ = [
    "AcceptanceReport",
    "ClaimLedger",
    "ContractViolation",
    "DimensionCapError",
    "EnergyGrid",
    "EnergyWindow",
    "EthParams",
    "ExperimentResult",
    "Hamiltonian",
    "PreconditionError",
    "ProtocolConfig",
    "QpeConfig",
    "SubspaceOracle",
    "TheoremViolation",
    "Violation",
    "build_M",
    "build_O_succ",
    "build_observables",
    "concentration_experiment",
    "default_config",
    "evaluate",
    "from_spectrum",
    "gaussian_norm_experiment",
    "load_experiment_config",
    "make_params",
    "no_case_norm",
    "overlap_bound_check",
    "perron_check",
    "q_weights",
    "qxc_dimension_count",
    "random_local",
    "run_experiment",
    "simple_verifier",
    "sinc_L",
    "unique_witness",
    "window_projector",
]
