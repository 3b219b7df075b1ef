"""Hamiltonians, energy windows and window projectors.

Synthetic spectra fix the eigenvalues exactly, so window counts and the
non-clustering ratios are known in closed form. Random 2-local models are
for demonstration runs where window statistics are emergent.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.stats import unitary_group

from witness_lab.linalg import (
    EigenDecomposition,
    eigh,
    hermitize,
    is_hermitian,
    lift,
    operator_norm,
)
from witness_lab.rng import stream_rng
from witness_lab.types import ContractViolation, DimensionCapError

logger = logging.getLogger(__name__)

WINDOW_TIE_TOL = 1e-12
MAX_QUBITS = 12

Provenance = Literal["synthetic-spectrum", "random-local", "rescaled"]


@dataclass(frozen=True)
class EnergyWindow:
    """Closed interval [e0 - delta/2, e0 + delta/2] inside the wider RMT window of width delta_rmt."""

    e0: float
    delta: float
    delta_rmt: float | None = None

    def __post_init__(self) -> None:
        if not np.isfinite(self.e0):
            raise ContractViolation("EnergyWindow", f"e0 must be finite, got {self.e0}")
        if not self.delta > 0:
            raise ContractViolation("EnergyWindow", f"delta must be positive, got {self.delta}")
        if self.delta_rmt is None:
            object.__setattr__(self, "delta_rmt", self.delta)
        elif self.delta_rmt < self.delta:
            raise ContractViolation(
                "EnergyWindow",
                f"delta_rmt {self.delta_rmt} is smaller than delta {self.delta}",
            )

    @property
    def lower(self) -> float:
        return self.e0 - self.delta / 2

    @property
    def upper(self) -> float:
        return self.e0 + self.delta / 2

    def contains(self, energies) -> np.ndarray:
        """Membership of each energy, endpoints included."""
        e = np.asarray(energies, dtype=float)
        return np.abs(e - self.e0) <= self.delta / 2 + WINDOW_TIE_TOL

    def rmt(self) -> EnergyWindow:
        return EnergyWindow(self.e0, self.delta_rmt, self.delta_rmt)


@dataclass(frozen=True, eq=False)
class Hamiltonian:
    """Dense Hermitian operator with its eigendecomposition cached at construction."""

    matrix: np.ndarray
    decomposition: EigenDecomposition
    provenance: Provenance

    @classmethod
    def from_matrix(cls, matrix, provenance: Provenance = "random-local") -> Hamiltonian:
        arr = np.asarray(matrix, dtype=np.complex128)
        if not is_hermitian(arr):
            raise ContractViolation("Hamiltonian", "matrix is not Hermitian")
        arr = hermitize(arr)
        arr.setflags(write=False)
        return cls(arr, eigh(arr, check=False), provenance)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.decomposition.eigenvalues

    @property
    def eigenvectors(self) -> np.ndarray:
        return self.decomposition.eigenvectors

    def affine(self, scale: float, shift: float) -> Hamiltonian:
        """scale * (H - shift), keeping the eigenvectors and mapping eigenvalues exactly."""
        if scale <= 0:
            raise ContractViolation("Hamiltonian.affine", f"scale must be positive, got {scale}")
        matrix = scale * (self.matrix - shift * np.eye(self.dim))
        matrix.setflags(write=False)
        dec = EigenDecomposition(scale * (self.eigenvalues - shift), self.eigenvectors)
        return Hamiltonian(matrix, dec, "rescaled")


@dataclass(frozen=True, eq=False)
class WindowProjector:
    """Projector onto the eigenvectors whose eigenvalue lies in the window."""

    matrix: np.ndarray
    members: tuple[int, ...]
    basis: np.ndarray
    window: EnergyWindow

    @property
    def D(self) -> int:
        return len(self.members)


def from_spectrum(
    eigenvalues: Sequence[float],
    basis: Literal["identity", "random"] = "identity",
    seed: int | None = None,
) -> Hamiltonian:
    """Hamiltonian with exactly the requested eigenvalues.

    ``basis="random"`` conjugates by a Haar-random unitary drawn from ``seed``.
    """
    values = np.sort(np.asarray(eigenvalues, dtype=float).reshape(-1))
    if values.size == 0:
        raise ContractViolation("from_spectrum", "eigenvalue list is empty")
    if not np.all(np.isfinite(values)):
        raise ContractViolation("from_spectrum", "eigenvalues must be finite")
    n = values.size
    if basis == "identity":
        vectors = np.eye(n, dtype=np.complex128)
    elif basis == "random":
        if seed is None:
            raise ContractViolation("from_spectrum", "a random basis needs a seed")
        if n == 1:
            vectors = np.ones((1, 1), dtype=np.complex128)
        else:
            vectors = unitary_group.rvs(n, random_state=stream_rng(seed, 0))
    else:
        raise ContractViolation("from_spectrum", f"unknown basis {basis!r}")
    matrix = hermitize((vectors * values) @ vectors.conj().T)
    matrix.setflags(write=False)
    return Hamiltonian(matrix, EigenDecomposition(values, vectors), "synthetic-spectrum")


def random_local(n: int, terms: int, seed: int) -> Hamiltonian:
    """Sum of ``terms`` random 2-local Hermitian terms on n qubits, each of operator norm 1.

    Each term acts on a uniformly chosen pair of qubits with a GUE-distributed
    4x4 block.
    """
    if n > MAX_QUBITS:
        raise DimensionCapError("random_local", 2**n, 2**MAX_QUBITS)
    if n < 1:
        raise ContractViolation("random_local", f"need at least one qubit, got {n}")
    if terms < 0:
        raise ContractViolation("random_local", f"term count must be non-negative, got {terms}")
    if terms > 0 and n < 2:
        raise ContractViolation("random_local", "2-local terms need at least two qubits")

    layout = tuple((f"q{k}", 2) for k in range(n))
    dim = 2**n
    H = np.zeros((dim, dim), dtype=np.complex128)
    rng = stream_rng(seed, 0)
    for _ in range(terms):
        i, j = sorted(rng.choice(n, size=2, replace=False))
        g = (rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))) / np.sqrt(2)
        h = hermitize(g)
        h /= operator_norm(h)
        H += lift(h, (f"q{i}", f"q{j}"), layout)
    logger.debug("random_local: n=%d terms=%d seed=%d", n, terms, seed)
    return Hamiltonian.from_matrix(H, "random-local")


def window_projector(H: Hamiltonian, window: EnergyWindow) -> WindowProjector:
    """Projector onto eigenvectors with eigenvalue in the closed window. D = 0 is allowed."""
    mask = window.contains(H.eigenvalues)
    members = tuple(int(a) for a in np.flatnonzero(mask))
    basis = H.eigenvectors[:, list(members)]
    matrix = basis @ basis.conj().T
    matrix.setflags(write=False)
    return WindowProjector(matrix, members, basis, window)


def _count_within(eigenvalues: np.ndarray, e0: float, width: float) -> int:
    if width < 0:
        return 0
    return int(np.count_nonzero(np.abs(eigenvalues - e0) <= width / 2 + WINDOW_TIE_TOL))


def non_clustering_report(H: Hamiltonian, window: EnergyWindow, poly_margin: float) -> tuple[float, float]:
    """(C, C') with C = Tr(Pi_delta)/Tr(Pi_rmt) and C' = Tr(Pi_{delta - margin})/Tr(Pi_delta).

    C' is 1.0 when the window itself is empty.
    """
    lam = H.eigenvalues
    rmt_count = _count_within(lam, window.e0, window.delta_rmt)
    if rmt_count == 0:
        raise ContractViolation("non_clustering_report", "RMT window contains no eigenvalues")
    count = _count_within(lam, window.e0, window.delta)
    inner = _count_within(lam, window.e0, window.delta - poly_margin)
    C = count / rmt_count
    C_prime = inner / count if count else 1.0
    return C, C_prime


def equispaced_spectrum(count: int, low: float, high: float) -> np.ndarray:
    """``count`` equally spaced values from low to high inclusive."""
    if count < 1:
        raise ContractViolation("equispaced_spectrum", f"count must be positive, got {count}")
    return np.linspace(low, high, count)
