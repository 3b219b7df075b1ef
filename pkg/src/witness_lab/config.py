"""Experiment configuration: per-block dataclasses, experiment defaults and self-check sizes.

A config file only names what differs from the experiment's defaults; the
loader merges it over ``EXPERIMENT_DEFAULTS`` and freezes the result.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any

EXPERIMENTS = (
    "qprops",
    "qpe",
    "gap",
    "protocol",
    "effectiveop",
    "qdoesntmatter",
    "witness",
    "nocase",
    "concentration",
    "gaussnorm",
    "oracle",
)


@dataclass(frozen=True)
class EnsembleBlock:
    D: int = 32
    m: int = 64
    f: float = 0.6
    f_mode: str = "uniform"
    f_matrix_file: str | None = None
    mu_mode: str = "zero"
    mu: float = 0.0


@dataclass(frozen=True)
class QpeBlock:
    L: int = 1024
    L_values: tuple[int, ...] = (64, 256, 1024)


@dataclass(frozen=True)
class WindowBlock:
    e0: float = 0.5
    delta: float = 0.25
    delta_rmt: float | None = None


@dataclass(frozen=True)
class SpectrumBlock:
    """Where eigenvalues come from: uniform draws, an equispaced grid, a file, or a random 2-local model."""

    kind: str = "uniform"
    count: int = 64
    low: float = 0.0
    high: float = 1.0
    file: str | None = None
    basis: str = "identity"
    qubits: int = 3
    terms: int = 6


@dataclass(frozen=True)
class ProtocolBlock:
    epsilon: float = 0.1
    epsilon_values: tuple[float, ...] = (0.0, 0.05, 0.1)
    mode: str = "direct"
    m: int = 4
    m_values: tuple[int, ...] = (64, 512, 4096)
    c: float = 16.0


@dataclass(frozen=True)
class TrialsBlock:
    count: int = 20


@dataclass(frozen=True)
class ConcentrationBlock:
    m_values: tuple[int, ...] = (16, 64, 256, 1024)
    trials: int = 50


@dataclass(frozen=True)
class GaussnormBlock:
    D_values: tuple[int, ...] = (16, 64)
    samples: int = 200
    variance: float = 1.0


@dataclass(frozen=True)
class OracleBlock:
    N: int = 32
    k: int = 4
    epsilon_values: tuple[float, ...] = (0.01, 0.25)
    instances: int = 500
    k1: int = 2
    k2: int = 4
    a: float = 2 / 3
    b: float = 1 / 3


BLOCKS: dict[str, type] = {
    "ensemble": EnsembleBlock,
    "qpe": QpeBlock,
    "window": WindowBlock,
    "spectrum": SpectrumBlock,
    "protocol": ProtocolBlock,
    "trials": TrialsBlock,
    "concentration": ConcentrationBlock,
    "gaussnorm": GaussnormBlock,
    "oracle": OracleBlock,
}


@dataclass(frozen=True)
class ExperimentConfig:
    """A validated experiment configuration with every block filled in."""

    experiment: str
    seed: int
    output_dir: str | None = None
    workers: int = 1
    base_dir: Path = field(default=Path("."), compare=False)
    ensemble: EnsembleBlock = field(default_factory=EnsembleBlock)
    qpe: QpeBlock = field(default_factory=QpeBlock)
    window: WindowBlock = field(default_factory=WindowBlock)
    spectrum: SpectrumBlock = field(default_factory=SpectrumBlock)
    protocol: ProtocolBlock = field(default_factory=ProtocolBlock)
    trials: TrialsBlock = field(default_factory=TrialsBlock)
    concentration: ConcentrationBlock = field(default_factory=ConcentrationBlock)
    gaussnorm: GaussnormBlock = field(default_factory=GaussnormBlock)
    oracle: OracleBlock = field(default_factory=OracleBlock)

    def to_dict(self) -> dict[str, Any]:
        """Plain dict for reports, without ``base_dir`` and ``workers``."""
        out: dict[str, Any] = {"experiment": self.experiment, "seed": self.seed}
        for name in BLOCKS:
            block = getattr(self, name)
            out[name] = {f.name: getattr(block, f.name) for f in fields(block)}
        return out


# Defaults per experiment, merged over the block defaults above.
EXPERIMENT_DEFAULTS: dict[str, dict[str, dict[str, Any]]] = {
    "qprops": {
        "spectrum": {"kind": "uniform", "count": 64, "low": 0.0, "high": 1.0},
        "qpe": {"L_values": (64, 256, 1024)},
        "trials": {"count": 50},
    },
    "qpe": {
        "spectrum": {"kind": "uniform", "count": 8, "basis": "random"},
        "qpe": {"L_values": (8, 16)},
        "window": {"e0": 0.5, "delta": 0.7},
        "trials": {"count": 10},
    },
    "gap": {
        "ensemble": {"D": 64, "f": 0.5, "f_mode": "random"},
        "trials": {"count": 100},
    },
    "protocol": {
        "spectrum": {"kind": "uniform", "count": 8, "low": 0.1, "high": 0.9, "basis": "random"},
        "qpe": {"L": 16},
        "window": {"e0": 0.5, "delta": 0.5},
        "protocol": {"epsilon_values": (0.0, 0.05, 0.1), "m": 4, "mode": "circuit"},
        "trials": {"count": 20},
    },
    "effectiveop": {
        "ensemble": {"D": 32, "f": 0.6, "mu_mode": "jitter", "mu": 0.0},
        "protocol": {"epsilon": 0.1, "m_values": (64, 512, 4096)},
        "qpe": {"L": 1024},
        "window": {"e0": 0.5, "delta": 0.25},
        "trials": {"count": 20},
    },
    "qdoesntmatter": {
        "ensemble": {"D": 32, "f": 0.6, "f_mode": "random"},
        "qpe": {"L": 1024},
        "window": {"e0": 0.5, "delta": 0.25},
        "trials": {"count": 20},
    },
    "witness": {
        "ensemble": {"D": 32, "m": 64, "f": 0.6, "f_mode": "random"},
        "protocol": {"epsilon": 0.1},
        "qpe": {"L": 1024},
        "window": {"e0": 0.5, "delta": 0.25},
        "trials": {"count": 20},
    },
    "nocase": {
        "spectrum": {"kind": "uniform", "count": 8, "basis": "random"},
        "qpe": {"L": 256},
        "window": {"e0": 0.5, "delta": 0.25},
        "protocol": {"epsilon": 0.1, "m": 4, "mode": "circuit", "c": 16.0},
        "trials": {"count": 20},
    },
    "concentration": {
        "ensemble": {"D": 16, "f": 0.6},
        "concentration": {"m_values": (16, 64, 256, 1024), "trials": 50},
    },
    "gaussnorm": {
        "gaussnorm": {"D_values": (16, 64), "samples": 200},
    },
    "oracle": {
        "oracle": {"N": 32, "k": 4, "epsilon_values": (0.01, 0.25), "instances": 500},
    },
}

# Small sizes for --self-check, merged over the experiment defaults.
SELF_CHECK_OVERRIDES: dict[str, dict[str, dict[str, Any]]] = {
    "qprops": {"trials": {"count": 10}},
    "qpe": {"qpe": {"L_values": (8,)}, "trials": {"count": 3}},
    "gap": {"ensemble": {"D": 32}, "trials": {"count": 20}},
    "protocol": {"trials": {"count": 3}, "protocol": {"m": 2}},
    "effectiveop": {
        "ensemble": {"D": 16},
        "protocol": {"m_values": (16, 128)},
        "trials": {"count": 6},
    },
    "qdoesntmatter": {"ensemble": {"D": 16}, "trials": {"count": 5}},
    "witness": {"ensemble": {"D": 16, "m": 16}, "trials": {"count": 5}},
    "nocase": {"trials": {"count": 5}},
    "concentration": {"concentration": {"m_values": (16, 64, 256), "trials": 20}},
    "gaussnorm": {"gaussnorm": {"samples": 50}},
    "oracle": {"oracle": {"instances": 60}},
}
