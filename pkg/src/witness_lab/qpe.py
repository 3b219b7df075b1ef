"""Phase estimation: sinc_L kernels, the weight operator Q(H), U_QPE and the projector Pi_SP.

Q(H) is diagonal in the eigenbasis of H with weights

    q_a = sum_{m = m_lo}^{m_hi} sinc_L(lambda_a - m/L)^2

and equals the P-register compression of Pi_SP against the uniform state.
Phases alias modulo 1, so spectra are expected in [0, 1); ``to_unit_interval``
maps a Hamiltonian there and records the affine map.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from witness_lab.grid import ALIGN_TOL, EnergyGrid
from witness_lab.hamiltonian import EnergyWindow, Hamiltonian, window_projector
from witness_lab.linalg import hermitize, kron, operator_norm, require_dim
from witness_lab.types import ClaimLedger, ContractViolation, check_claim

SINC_SINGULAR_TOL = 1e-9
Q_UPPER_SLACK = 1e-10
LEMMA_SLACK = 1e-12


def sinc_L(x, L: int):
    """sin(pi L x) / (L sin(pi x)), with the limit (-1)^((L+1)k) at integers k."""
    arr = np.asarray(x, dtype=float)
    k = np.round(arr)
    near = np.abs(arr - k) < SINC_SINGULAR_TOL
    with np.errstate(divide="ignore", invalid="ignore"):
        value = np.sin(np.pi * L * arr) / (L * np.sin(np.pi * arr))
    limit = np.where(np.mod((L + 1) * k, 2) == 0, 1.0, -1.0)
    out = np.where(near, limit, value)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class QpeConfig:
    """Resolution L and the integer limits of the inner window I_omega = [m_lo/L, m_hi/L]."""

    L: int
    window: EnergyWindow
    m_lo: int
    m_hi: int

    def __post_init__(self) -> None:
        EnergyGrid(self.L)
        if self.m_lo > self.m_hi:
            raise ContractViolation("QpeConfig", f"empty grid: m_lo={self.m_lo} > m_hi={self.m_hi}")
        if self.m_lo == self.m_hi:
            raise ContractViolation("QpeConfig", "inner width omega must be positive")
        if self.m_hi - self.m_lo >= self.L:
            raise ContractViolation(
                "QpeConfig", f"{self.m_hi - self.m_lo + 1} grid points do not fit in L={self.L}"
            )

    @classmethod
    def for_window(cls, window: EnergyWindow, L: int) -> QpeConfig:
        """Largest inner width omega <= delta - 1/sqrt(L) with integer limits around e0."""
        m_lo, m_hi = EnergyGrid(L).inner_limits(window.e0, window.delta)
        return cls(L, window, m_lo, m_hi)

    @property
    def grid(self) -> EnergyGrid:
        return EnergyGrid(self.L)

    @property
    def omega(self) -> float:
        return (self.m_hi - self.m_lo) / self.L

    @property
    def inner_lower(self) -> float:
        return self.m_lo / self.L

    @property
    def inner_upper(self) -> float:
        return self.m_hi / self.L

    @property
    def grid_count(self) -> int:
        return self.m_hi - self.m_lo + 1

    def indices(self) -> np.ndarray:
        return np.arange(self.m_lo, self.m_hi + 1)


@dataclass(frozen=True, eq=False)
class QWeights:
    """Per-eigenvalue weights (ordered like H's eigenvalues) and the operator Q(H)."""

    weights: np.ndarray
    matrix: np.ndarray
    config: QpeConfig


def weights_for(eigenvalues, config: QpeConfig) -> np.ndarray:
    """q for each eigenvalue by direct summation over the grid."""
    lam = np.asarray(eigenvalues, dtype=float).reshape(-1)
    m = config.indices() / config.L
    return np.sum(sinc_L(lam[:, None] - m[None, :], config.L) ** 2, axis=1)


def q_weights(
    H: Hamiltonian,
    config: QpeConfig,
    *,
    ledger: ClaimLedger | None = None,
    seed: int | None = None,
) -> QWeights:
    """Weights and the diagonal operator Q(H) in the eigenbasis of H.

    A weight above 1 + 1e-10 is flagged as a violation, never clamped.
    """
    q = weights_for(H.eigenvalues, config)
    top = float(np.max(q))
    check_claim(
        "q_weights.upper_bound",
        top <= 1 + Q_UPPER_SLACK,
        top,
        1.0,
        seed=seed,
        ledger=ledger,
    )
    matrix = H.decomposition.apply_function(q.astype(np.complex128))
    matrix.setflags(write=False)
    q.setflags(write=False)
    return QWeights(q, matrix, config)


def uniform_state(L: int) -> np.ndarray:
    """|mu> = L^{-1/2} sum_k |k>."""
    return np.full(L, 1 / math.sqrt(L), dtype=np.complex128)


def pi_p(L: int) -> np.ndarray:
    mu = uniform_state(L)
    return np.outer(mu, mu.conj())


def build_u_qpe(H: Hamiltonian, L: int) -> np.ndarray:
    """U_QPE on S (x) P: controlled evolution e^{2 pi i k H} followed by the inverse Fourier transform.

    Rows and columns are indexed (s, p) with s major, matching kron(S, P).
    """
    EnergyGrid(L)
    N = H.dim
    require_dim("build_u_qpe", N * L)
    V = H.eigenvectors
    k = np.arange(L)
    phases = np.exp(2j * np.pi * np.outer(k, H.eigenvalues))
    evolutions = np.einsum("ia,ka,ja->kij", V, phases, V.conj())
    fourier = np.exp(-2j * np.pi * np.outer(k, k) / L) / math.sqrt(L)
    U = np.einsum("kij,mk->imjk", evolutions, fourier)
    return U.reshape(N * L, N * L)


def _grid_mask(config: QpeConfig) -> np.ndarray:
    mask = np.zeros(config.L, dtype=bool)
    mask[np.mod(config.indices(), config.L)] = True
    return mask


def build_pi_sp(H: Hamiltonian, config: QpeConfig) -> np.ndarray:
    """Pi_SP = U_QPE^dagger (I (x) sum_m |m><m|) U_QPE, with m taken modulo L."""
    U = build_u_qpe(H, config.L)
    rows = np.tile(_grid_mask(config), H.dim)
    kept = U[rows]
    return hermitize(kept.conj().T @ kept)


def on_grid_spectrum(config: QpeConfig, count: int, span: float | None = None) -> np.ndarray:
    """``count`` distinct grid energies m/L spread evenly over a band of width ``span``.

    The band is centred in the inner window, defaults to all of it and is
    clipped to it.
    """
    center = (config.m_lo + config.m_hi) // 2
    half = config.omega / 2 if span is None else min(span, config.omega) / 2
    reach = math.floor(half * config.L + ALIGN_TOL)
    indices = np.unique(np.round(np.linspace(center - reach, center + reach, count)).astype(int))
    if indices.size < count:
        raise ContractViolation(
            "on_grid_spectrum", f"{count} distinct grid points do not fit in a band of {2 * reach + 1}"
        )
    return indices / config.L


def qpe_identity_residual(H: Hamiltonian, config: QpeConfig) -> float:
    """|| Pi_P Pi_SP Pi_P - Q(H) (x) Pi_P ||."""
    P = kron(np.eye(H.dim), pi_p(config.L))
    compressed = P @ build_pi_sp(H, config) @ P
    expected = kron(q_weights(H, config).matrix, pi_p(config.L))
    return operator_norm(hermitize(compressed - expected))


def qmass_check(H: Hamiltonian, window: EnergyWindow, config: QpeConfig) -> tuple[float, float]:
    """(||Q(H) - Pi_delta Q(H)||, 2/sqrt(L))."""
    Q = q_weights(H, config)
    projector = window_projector(H, window)
    measured = operator_norm(hermitize(Q.matrix - projector.matrix @ Q.matrix))
    return measured, 2 / math.sqrt(config.L)


# ---------------------------------------------------------------------------
# Almost Identity / Almost Zero
# ---------------------------------------------------------------------------
def almost_identity_margin(eigenvalues, config: QpeConfig) -> np.ndarray:
    """Largest integer c with lambda in [m_lo/L + c/L, m_hi/L - c/L]; negative outside."""
    lam = np.asarray(eigenvalues, dtype=float)
    margin = np.minimum(lam * config.L - config.m_lo, config.m_hi - lam * config.L)
    return np.floor(margin + ALIGN_TOL).astype(int)


def almost_zero_margin(eigenvalues, config: QpeConfig) -> np.ndarray:
    """Circular distance from lambda to the inner window, in grid units (c/L with c returned)."""
    return config.grid.distance_to_interval(eigenvalues, config.inner_lower, config.inner_upper)


def q_lemma_violations(
    eigenvalues,
    config: QpeConfig,
    ledger: ClaimLedger,
    *,
    seed: int | None = None,
) -> None:
    """Check q >= 1 - 1/c (Almost Identity) and q <= 1/c (Almost Zero) for every eigenvalue."""
    lam = np.asarray(eigenvalues, dtype=float)
    q = weights_for(lam, config)
    c_in = almost_identity_margin(lam, config)
    c_out = almost_zero_margin(lam, config)
    for a in range(lam.size):
        if c_in[a] >= 1:
            bound = 1 - 1 / c_in[a]
            check_claim(
                "q_properties.almost_identity",
                q[a] >= bound - LEMMA_SLACK,
                q[a],
                bound,
                seed=seed,
                detail=f"lambda={lam[a]!r} c={int(c_in[a])} L={config.L}",
                ledger=ledger,
            )
        if c_out[a] > 0:
            bound = 1 / c_out[a]
            check_claim(
                "q_properties.almost_zero",
                q[a] <= bound + LEMMA_SLACK,
                q[a],
                bound,
                seed=seed,
                detail=f"lambda={lam[a]!r} c={c_out[a]:.6g} L={config.L}",
                ledger=ledger,
            )


# ---------------------------------------------------------------------------
# Rescaling into [0, 1)
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class AffineMap:
    """e -> scale * (e - shift)."""

    scale: float
    shift: float

    def apply(self, energy):
        return self.scale * (np.asarray(energy, dtype=float) - self.shift)

    def invert(self, energy):
        return np.asarray(energy, dtype=float) / self.scale + self.shift


def to_unit_interval(
    H: Hamiltonian,
    window: EnergyWindow | None = None,
    padding: float = 0.1,
    L: int | None = None,
) -> tuple[Hamiltonian, EnergyWindow | None, AffineMap]:
    """Map the spectrum of H affinely into [padding, 1 - padding].

    A window given in the original units is mapped along. With ``L`` and a
    window given, the shift is adjusted by less than half a grid step so the
    window centre lands on the grid; the adjustment is part of the returned
    map.
    """
    if not 0 <= padding < 0.5:
        raise ContractViolation("to_unit_interval", f"padding must be in [0, 0.5), got {padding}")
    lam = H.eigenvalues
    spread = float(lam[-1] - lam[0])
    scale = (1 - 2 * padding) / spread if spread > 0 else 1.0
    shift = float(lam[0]) - padding / scale
    if L is not None and window is not None:
        grid = EnergyGrid(L)
        center = scale * (window.e0 - shift)
        snapped = round(center * grid.L) / grid.L
        shift += (center - snapped) / scale
    amap = AffineMap(scale, shift)
    mapped = None
    if window is not None:
        mapped = EnergyWindow(
            float(amap.apply(window.e0)),
            window.delta * scale,
            window.delta_rmt * scale,
        )
    return H.affine(scale, shift), mapped, amap
