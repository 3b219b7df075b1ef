"""The random-matrix ansatz inside an energy window.

Within a window of dimension D the i-th observable has matrix elements

    <a| A_i |b> = mu^i_a delta_ab + f_ab g^i_ab / sqrt(D)

with g Hermitian complex Gaussian (real unit-variance diagonal) and f a
symmetric amplitude matrix. Direct mode samples exactly this block. Circuit
mode draws exact involutions on the full space and measures what their window
block looks like.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Literal

import numpy as np
from scipy.stats import unitary_group

from witness_lab.hamiltonian import EnergyWindow, Hamiltonian, window_projector
from witness_lab.linalg import conjugate_in_basis, hermitize, operator_norm, require_dim
from witness_lab.rng import stream_rng
from witness_lab.types import ContractViolation, DimensionCapError

logger = logging.getLogger(__name__)

CIRCUIT_CAP = 256
ENTRY_TOL = 1e-12

FMode = Literal["uniform", "random", "explicit"]
MuMode = Literal["zero", "constant", "jitter"]
ObservableMode = Literal["direct", "circuit"]


@dataclass(frozen=True, eq=False)
class EthParams:
    """Window dimension D, observable count m, amplitudes f_ab and diagonals mu^i_a.

    f_matrix is symmetric with entries in [0, 1]. ``within_transition_bounds``
    reports whether every entry also lies in [f, 1]; claims that need that
    hypothesis check it themselves, so degenerate ensembles (f_matrix = 0)
    remain constructible.
    """

    D: int
    m: int
    f: float
    f_matrix: np.ndarray
    mu: np.ndarray

    def __post_init__(self) -> None:
        if self.D < 1:
            raise ContractViolation("EthParams", f"D must be positive, got {self.D}")
        if self.m < 1:
            raise ContractViolation("EthParams", f"m must be positive, got {self.m}")
        if not 0 < self.f <= 1:
            raise ContractViolation("EthParams", f"f must satisfy 0 < f <= 1, got {self.f}")
        fm = np.array(self.f_matrix, dtype=float)
        if fm.shape != (self.D, self.D):
            raise ContractViolation(
                "EthParams", f"f_matrix has shape {fm.shape}, expected {(self.D, self.D)}"
            )
        if not np.allclose(fm, fm.T, atol=ENTRY_TOL, rtol=0):
            raise ContractViolation("EthParams", "f_matrix must be symmetric")
        if np.any(fm < -ENTRY_TOL) or np.any(fm > 1 + ENTRY_TOL):
            raise ContractViolation("EthParams", "f_matrix entries must lie in [0, 1]")
        mu = np.array(self.mu, dtype=float)
        if mu.shape != (self.m, self.D):
            raise ContractViolation("EthParams", f"mu has shape {mu.shape}, expected {(self.m, self.D)}")
        spread = float(np.max(mu.max(axis=1) - mu.min(axis=1)))
        if spread > self.f**7 + ENTRY_TOL:
            raise ContractViolation(
                "EthParams", f"diagonal spread {spread:.3g} exceeds f^7 = {self.f**7:.3g}"
            )
        fm.setflags(write=False)
        mu.setflags(write=False)
        object.__setattr__(self, "f_matrix", fm)
        object.__setattr__(self, "mu", mu)

    @property
    def within_transition_bounds(self) -> bool:
        return bool(np.all(self.f_matrix >= self.f - ENTRY_TOL))

    @property
    def mu_top(self) -> np.ndarray:
        """mu^i = max_a mu^i_a, one per observable."""
        return self.mu.max(axis=1)

    @property
    def mean_mu_sq(self) -> float:
        return float(np.mean(self.mu_top**2))

    def scaled(self, c: float) -> EthParams:
        """Same ensemble with every f_ab multiplied by c."""
        return EthParams(self.D, self.m, self.f, self.f_matrix * c, self.mu)

    def with_m(self, m: int) -> EthParams:
        """Same amplitudes with m observables; diagonals repeat row-wise."""
        rows = np.resize(self.mu, (m, self.D))
        return EthParams(self.D, m, self.f, self.f_matrix, rows)


def make_params(
    D: int,
    m: int,
    f: float,
    *,
    f_mode: FMode = "uniform",
    mu_mode: MuMode = "zero",
    mu: float = 0.0,
    f_matrix=None,
    seed: int = 0,
) -> EthParams:
    """Build EthParams from the ensemble config fields.

    ``random`` draws each f_ab uniformly from [f, 1]; ``jitter`` adds a
    per-entry offset in [0, f^7) to the constant ``mu``.
    """
    if f_mode == "uniform":
        fm = np.full((D, D), f)
    elif f_mode == "random":
        rng = stream_rng(seed, 1)
        upper = rng.uniform(f, 1.0, size=(D, D))
        fm = np.triu(upper) + np.triu(upper, 1).T
    elif f_mode == "explicit":
        if f_matrix is None:
            raise ContractViolation("make_params", "explicit f_mode needs f_matrix")
        fm = np.asarray(f_matrix, dtype=float)
    else:
        raise ContractViolation("make_params", f"unknown f_mode {f_mode!r}")

    if mu_mode == "zero":
        mus = np.zeros((m, D))
    elif mu_mode == "constant":
        mus = np.full((m, D), mu)
    elif mu_mode == "jitter":
        rng = stream_rng(seed, 2)
        mus = mu + f**7 * rng.uniform(0.0, 1.0, size=(m, D))
    else:
        raise ContractViolation("make_params", f"unknown mu_mode {mu_mode!r}")
    return EthParams(D, m, f, fm, mus)


def circuit_params(m: int) -> EthParams:
    """Parameters for circuit-mode observables, which read only the count m."""
    return EthParams(1, m, 1.0, np.ones((1, 1)), np.zeros((m, 1)))


# ---------------------------------------------------------------------------
# Gaussian sampling
# ---------------------------------------------------------------------------
def sample_complex_gaussian(rng: np.random.Generator, size=None):
    """g = a + ib with a, b independent N(0, 1/2), so E|g|^2 = 1 and E g^2 = 0."""
    a = rng.standard_normal(size)
    b = rng.standard_normal(size)
    return (a + 1j * b) / math.sqrt(2)


def hermitian_gaussian(D: int, rng: np.random.Generator) -> np.ndarray:
    """Hermitian G with complex Gaussian off-diagonal entries and real unit-variance diagonal."""
    upper = np.triu(sample_complex_gaussian(rng, (D, D)), 1)
    return upper + upper.conj().T + np.diag(rng.standard_normal(D)).astype(np.complex128)


@dataclass(frozen=True, eq=False)
class GaussianFluctuation:
    B: np.ndarray


def sample_B(params: EthParams, rng: np.random.Generator) -> GaussianFluctuation:
    """B_ab = f_ab g_ab / sqrt(D) with g_ba = conj(g_ab)."""
    B = params.f_matrix * hermitian_gaussian(params.D, rng) / math.sqrt(params.D)
    B.setflags(write=False)
    return GaussianFluctuation(B)


def sample_B_stack(params: EthParams, seed: int, count: int, *keys: int) -> np.ndarray:
    """``count`` independent B matrices, the i-th drawn from stream (seed, *keys, i)."""
    out = np.empty((count, params.D, params.D), dtype=np.complex128)
    for i in range(count):
        out[i] = sample_B(params, stream_rng(seed, *keys, i)).B
    return out


def expected_BB(params: EthParams) -> np.ndarray:
    """E_G B (x) conj(B) = (1/D) sum_ab f_ab^2 |aa><bb|, as a real D^2 x D^2 matrix."""
    D = params.D
    require_dim("expected_BB", D * D)
    out = np.zeros((D * D, D * D))
    pairs = np.arange(D) * (D + 1)
    out[np.ix_(pairs, pairs)] = params.f_matrix**2 / D
    return out


def pair_restriction(params: EthParams) -> np.ndarray:
    """M_f = f^2 / D, the restriction of expected_BB to span{|aa>}."""
    return params.f_matrix**2 / params.D


def pair_moment(ops: np.ndarray, partners: np.ndarray) -> np.ndarray:
    """E_i ops_i (x) partners_i as a dense n^2 x n^2 matrix, via one product of the flattened stacks."""
    m, n, _ = ops.shape
    require_dim("pair_moment", n * n)
    left = ops.reshape(m, n * n)
    right = partners.reshape(m, n * n)
    gram = left.T @ right / m
    # gram[(a, b), (c, d)] = E ops_ab partners_cd; reorder to rows (a, c), columns (b, d)
    return gram.reshape(n, n, n, n).transpose(0, 2, 1, 3).reshape(n * n, n * n)


def second_moment(blocks: np.ndarray) -> np.ndarray:
    """E_i X_i (x) conj(X_i) for a stack of square blocks."""
    return pair_moment(blocks, blocks.conj())


# ---------------------------------------------------------------------------
# Observable sets
# ---------------------------------------------------------------------------
def haar_offdiag_variance(N: int, k: int | None = None) -> float:
    """Exact E|A_ab|^2 (a != b) for A = I - 2 W P W^dagger with W Haar and rank-k P."""
    k = N // 2 if k is None else k
    return 4 * k * (N - k) / (N * (N * N - 1))


@dataclass(frozen=True, eq=False)
class ObservableSet:
    """m observables and their conjugates in the eigenbasis of H.

    Direct mode: window blocks diag(mu^i) + B_i, in window coordinates.
    Circuit mode: full-space involutions, plus statistics of their measured
    window blocks.
    """

    mode: ObservableMode
    operators: np.ndarray
    conjugates: np.ndarray
    window_blocks: np.ndarray
    stats: dict[str, Any] = field(default_factory=dict)

    @property
    def m(self) -> int:
        return self.operators.shape[0]

    @property
    def dim(self) -> int:
        return self.operators.shape[1]


def build_observables(
    params: EthParams,
    H: Hamiltonian | None,
    window: EnergyWindow | None,
    mode: ObservableMode,
    seed: int,
) -> ObservableSet:
    """Sample the observable set for one ensemble seed.

    Observable i always comes from stream (seed, 10, i).
    """
    if mode == "direct":
        if H is not None and window is not None:
            D = window_projector(H, window).D
            if D == 0:
                raise ContractViolation("build_observables", "window contains no eigenvalues")
            if D != params.D:
                raise ContractViolation(
                    "build_observables", f"window dimension {D} does not match ensemble D={params.D}"
                )
        B = sample_B_stack(params, seed, params.m, 10)
        blocks = B + np.einsum("ia,ab->iab", params.mu, np.eye(params.D))
        blocks.setflags(write=False)
        conj = blocks.conj()
        return ObservableSet("direct", blocks, conj, blocks, {"D": params.D, "m": params.m})

    if mode != "circuit":
        raise ContractViolation("build_observables", f"unknown mode {mode!r}")
    if H is None or window is None:
        raise ContractViolation("build_observables", "circuit mode needs a Hamiltonian and a window")
    N = H.dim
    if N > CIRCUIT_CAP:
        raise DimensionCapError("build_observables", N, CIRCUIT_CAP)
    if N < 2:
        raise ContractViolation("build_observables", "circuit mode needs dimension at least 2")
    projector = window_projector(H, window)

    half = np.diag(np.r_[np.ones(N // 2), np.zeros(N - N // 2)])
    ops = np.empty((params.m, N, N), dtype=np.complex128)
    conj = np.empty_like(ops)
    for i in range(params.m):
        W = unitary_group.rvs(N, random_state=stream_rng(seed, 10, i))
        A = hermitize(np.eye(N) - 2 * W @ half @ W.conj().T)
        ops[i] = A
        conj[i] = hermitize(conjugate_in_basis(A, H.eigenvectors))
    Vw = projector.basis
    blocks = np.einsum("ja,ijk,kb->iab", Vw.conj(), ops, Vw)
    for arr in (ops, conj, blocks):
        arr.setflags(write=False)
    stats = _window_statistics(blocks, N)
    logger.debug(
        "circuit observables: N=%d D=%d m=%d f_hat=%.4f",
        N,
        projector.D,
        params.m,
        stats["f_hat"],
    )
    return ObservableSet("circuit", ops, conj, blocks, stats)


def _window_statistics(blocks: np.ndarray, N: int) -> dict[str, Any]:
    m, D, _ = blocks.shape
    mu_hat = np.real(np.einsum("iaa->ia", blocks))
    spread = float(np.max(mu_hat.max(axis=1) - mu_hat.min(axis=1))) if D else 0.0
    off = ~np.eye(D, dtype=bool)
    if D > 1:
        entries = blocks[:, off]
        mean = complex(np.mean(entries))
        variance = float(np.mean(np.abs(entries - mean) ** 2))
    else:
        mean, variance = 0j, 0.0
    return {
        "N": N,
        "D": D,
        "m": m,
        "mu_hat": mu_hat,
        "offdiag_mean": mean,
        "offdiag_variance": variance,
        "expected_offdiag_variance": haar_offdiag_variance(N),
        "f_hat": math.sqrt(variance * D),
        "mu_spread": spread,
    }


def involution_defect(observables: ObservableSet) -> float:
    """max_i ||A_i^2 - I|| over a circuit-mode set."""
    eye = np.eye(observables.dim)
    return max(operator_norm(hermitize(A @ A - eye)) for A in observables.operators)
