"""The energy subspace test, simulated two ways.

The circuit route runs the test on a statevector over registers S1, S2
(system copies), P1, P2 (phase registers) and T (the 2m-dimensional choice of
observable and sign). The operator route evaluates the acceptance probability
from Q(H) and the observables directly. The two agree exactly; the
second-order success operator O_succ and the effective operator M are built on
the doubled window space, in window coordinates |a, b>.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from witness_lab.ensemble import (
    EthParams,
    ObservableMode,
    ObservableSet,
    expected_BB,
    involution_defect,
    pair_moment,
    pair_restriction,
    second_moment,
)
from witness_lab.hamiltonian import EnergyWindow, Hamiltonian, window_projector
from witness_lab.linalg import (
    Statevector,
    apply_controlled,
    apply_to_register,
    expm_i,
    hermitize,
    operator_norm,
    project_register,
    require_dim,
    top_eigenpairs,
)
from witness_lab.qpe import (
    QpeConfig,
    almost_zero_margin,
    build_pi_sp,
    pi_p,
    q_weights,
    uniform_state,
    weights_for,
)
from witness_lab.types import (
    AcceptanceReport,
    ContractViolation,
    DimensionCapError,
    PreconditionError,
    WitnessResult,
)

logger = logging.getLogger(__name__)

CIRCUIT_S_CAP = 16
CIRCUIT_L_CAP = 32
CIRCUIT_M_CAP = 8
DIRECT_D_CAP = 64
DEGENERACY_TOL = 1e-9
INVOLUTION_TOL = 1e-10
INPUT_NORM_TOL = 1e-10


@dataclass(frozen=True)
class ProtocolConfig:
    """Rotation angle, observable mode, phase-estimation settings and observable count."""

    epsilon: float
    mode: ObservableMode
    qpe: QpeConfig
    m: int

    def __post_init__(self) -> None:
        if not 0 <= self.epsilon <= 0.5:
            raise ContractViolation("ProtocolConfig", f"epsilon must be in [0, 0.5], got {self.epsilon}")
        if self.m < 1:
            raise ContractViolation("ProtocolConfig", f"m must be positive, got {self.m}")
        if self.mode not in ("direct", "circuit"):
            raise ContractViolation("ProtocolConfig", f"unknown mode {self.mode!r}")

    @property
    def t_dim(self) -> int:
        return 2 * self.m


@dataclass(frozen=True, eq=False)
class SuccessOperator:
    """O_succ, and when the ensemble is known, M and (Q (x) Q) M (Q (x) Q).

    All three act on the doubled window space in window coordinates.
    """

    O_succ: np.ndarray
    M: np.ndarray | None
    sandwiched: np.ndarray | None
    q_window: np.ndarray
    epsilon: float


@dataclass(frozen=True)
class CircuitRun:
    """Acceptance probability of one circuit run and the squared norm after the first projection round."""

    p_circuit: float
    first_round_norm: float


# ---------------------------------------------------------------------------
# Shared helpers
# ---------------------------------------------------------------------------
def _pair_apply(left: np.ndarray, right: np.ndarray, X: np.ndarray) -> np.ndarray:
    """(left (x) right) acting on a doubled vector held as a square matrix X."""
    return left @ X @ right.T


def _input_matrix(psi: Statevector, dim: int, operation: str) -> np.ndarray:
    if psi.names != ("S1", "S2") or psi.dims != (dim, dim):
        raise ContractViolation(
            operation, f"input must have layout S1, S2 of dimension {dim}, got {psi.layout}"
        )
    if abs(psi.norm_sq() - 1) > INPUT_NORM_TOL:
        raise ContractViolation(operation, f"input is not normalised (squared norm {psi.norm_sq()})")
    return psi.amplitudes.reshape(dim, dim)


def _check_circuit(
    H: Hamiltonian, observables: ObservableSet, config: ProtocolConfig, operation: str
) -> None:
    if observables.mode != "circuit":
        raise ContractViolation(operation, "needs circuit-mode observables")
    if H.dim > CIRCUIT_S_CAP:
        raise DimensionCapError(operation, H.dim, CIRCUIT_S_CAP)
    if config.qpe.L > CIRCUIT_L_CAP:
        raise DimensionCapError(operation, config.qpe.L, CIRCUIT_L_CAP)
    if observables.m > CIRCUIT_M_CAP:
        raise DimensionCapError(operation, observables.m, CIRCUIT_M_CAP)
    if observables.dim != H.dim:
        raise ContractViolation(operation, f"observables act on {observables.dim}, H on {H.dim}")
    defect = involution_defect(observables)
    if defect > INVOLUTION_TOL:
        raise ContractViolation(operation, f"observables are not involutions (defect {defect:.3g})")


def window_coordinates(psi: Statevector, H: Hamiltonian, window: EnergyWindow) -> np.ndarray:
    """Components of a full-space input on the doubled window, as a D x D matrix."""
    X = psi.amplitudes.reshape(H.dim, H.dim)
    Vw = window_projector(H, window).basis
    return Vw.conj().T @ X @ Vw.conj()


def pair_state(x: np.ndarray) -> np.ndarray:
    """sum_a x_a |a, a> as a flat doubled vector."""
    D = len(x)
    out = np.zeros(D * D, dtype=np.complex128)
    out[np.arange(D) * (D + 1)] = x
    return out


# ---------------------------------------------------------------------------
# Circuit route
# ---------------------------------------------------------------------------
def run_algorithm1(
    psi: Statevector,
    H: Hamiltonian,
    observables: ObservableSet,
    config: ProtocolConfig,
) -> CircuitRun:
    """Statevector simulation of the energy subspace test.

    Steps: append |mu>|mu> on P1, P2; project with Pi_SP on (S1, P1) and
    (S2, P2); project P1, P2 onto |mu>; prepare T uniform and apply the
    T-controlled rotations; repeat both projections; post-select T on the
    uniform state. The returned probability is the surviving squared norm.
    """
    _check_circuit(H, observables, config, "run_algorithm1")
    _input_matrix(psi, H.dim, "run_algorithm1")
    L = config.qpe.L
    pi_sp = build_pi_sp(H, config.qpe)
    proj_p = pi_p(L)
    mu = uniform_state(L)

    def projection_round(state: Statevector) -> Statevector:
        state = apply_to_register(pi_sp, ("S1", "P1"), state)
        state = apply_to_register(pi_sp, ("S2", "P2"), state)
        state = apply_to_register(proj_p, "P1", state)
        return apply_to_register(proj_p, "P2", state)

    state = projection_round(psi.append("P1", mu).append("P2", mu))
    first_round = state.norm_sq()

    eps = config.epsilon
    t_uniform = np.full(2 * observables.m, 1 / math.sqrt(2 * observables.m), dtype=np.complex128)
    state = state.append("T", t_uniform)
    # T index 2i + b: b = 0 rotates by +eps on S1 and -eps on S2, b = 1 the reverse
    s1_blocks = []
    s2_blocks = []
    for A, A_bar in zip(observables.operators, observables.conjugates):
        for sign in (1, -1):
            s1_blocks.append(expm_i(A, sign * eps))
            s2_blocks.append(expm_i(A_bar, -sign * eps))
    state = apply_controlled(s1_blocks, "T", "S1", state)
    state = apply_controlled(s2_blocks, "T", "S2", state)

    state = projection_round(state)
    accepted = project_register(t_uniform, "T", state)
    p = accepted.norm_sq()
    logger.debug("run_algorithm1: eps=%.3g first_round=%.6f p=%.6f", eps, first_round, p)
    return CircuitRun(p, first_round)


# ---------------------------------------------------------------------------
# Operator route
# ---------------------------------------------------------------------------
def _route_operands(
    psi: Statevector,
    H: Hamiltonian,
    window: EnergyWindow | None,
    observables: ObservableSet,
    config: ProtocolConfig,
    operation: str,
) -> tuple[np.ndarray, np.ndarray]:
    """(input matrix, Q) in the coordinates the observables live in."""
    if observables.mode == "circuit":
        X = _input_matrix(psi, H.dim, operation)
        return X, q_weights(H, config.qpe).matrix
    if window is None:
        raise ContractViolation(operation, "direct mode needs the window")
    projector = window_projector(H, window)
    X = _input_matrix(psi, projector.D, operation)
    q = weights_for(H.eigenvalues[list(projector.members)], config.qpe)
    return X, np.diag(q).astype(np.complex128)


def acceptance_operator_route(
    psi: Statevector,
    H: Hamiltonian,
    observables: ObservableSet,
    config: ProtocolConfig,
    window: EnergyWindow | None = None,
) -> float:
    """Exact acceptance probability by the operator route:

    || E_i (Q (x) Q) (1/2 e^{ieA_i} (x) e^{-ieA_i*} + 1/2 e^{-ieA_i} (x) e^{ieA_i*}) (Q (x) Q) psi ||^2

    Circuit-mode inputs live on the full space; direct-mode inputs live in
    window coordinates and need the window.
    """
    X, Q = _route_operands(psi, H, window, observables, config, "acceptance_operator_route")
    eps = config.epsilon
    inner = _pair_apply(Q, Q, X)
    acc = np.zeros_like(inner)
    for A, A_bar in zip(observables.operators, observables.conjugates):
        plus = _pair_apply(expm_i(A, eps), expm_i(A_bar, -eps), inner)
        minus = _pair_apply(expm_i(A, -eps), expm_i(A_bar, eps), inner)
        acc += (plus + minus) / 2
    out = _pair_apply(Q, Q, acc / observables.m)
    return float(np.vdot(out, out).real)


def second_order_amplitude(
    psi: Statevector,
    H: Hamiltonian,
    observables: ObservableSet,
    config: ProtocolConfig,
    window: EnergyWindow | None = None,
) -> float:
    """|| (Q (x) Q)((1 - e^2) I + e^2 E_i A_i (x) conj(A_i))(Q (x) Q) psi ||^2 on the observables' space.

    This is the second-order expansion of the operator route; the remainder
    is O(e^4) because A_i^2 = I.
    """
    X, Q = _route_operands(psi, H, window, observables, config, "second_order_amplitude")
    eps = config.epsilon
    inner = _pair_apply(Q, Q, X)
    acc = (1 - eps**2) * inner
    for A, A_bar in zip(observables.operators, observables.conjugates):
        acc = acc + eps**2 * _pair_apply(A, A_bar, inner) / observables.m
    out = _pair_apply(Q, Q, acc)
    return float(np.vdot(out, out).real)


def build_second_order(H: Hamiltonian, observables: ObservableSet, config: ProtocolConfig) -> np.ndarray:
    """(Q (x) Q)((1 - e^2) I + e^2 E_i A_i (x) conj(A_i))(Q (x) Q) on the full doubled space.

    Returned in the product eigenbasis |a, b> of H, where Q is diagonal.
    """
    if observables.mode != "circuit":
        raise ContractViolation("build_second_order", "needs circuit-mode observables")
    N = H.dim
    require_dim("build_second_order", N * N)
    q = q_weights(H, config.qpe).weights
    # in the eigenbasis of H, conj(A_i) becomes the entrywise conjugate
    V = H.eigenvectors
    ops = np.einsum("ja,ijk,kb->iab", V.conj(), observables.operators, V)
    eps = config.epsilon
    core = (1 - eps**2) * np.eye(N * N) + eps**2 * pair_moment(ops, ops.conj())
    qq = np.kron(q, q)
    return hermitize(qq[:, None] * core * qq[None, :])


def taylor_residual(
    psi: Statevector,
    H: Hamiltonian,
    observables: ObservableSet,
    config: ProtocolConfig,
    window: EnergyWindow | None = None,
) -> float:
    """|p_operator - ||(second-order operator) psi||^2|."""
    exact = acceptance_operator_route(psi, H, observables, config, window)
    return abs(exact - second_order_amplitude(psi, H, observables, config, window))


# ---------------------------------------------------------------------------
# Success operator, effective operator, witness
# ---------------------------------------------------------------------------
def build_M(params: EthParams, epsilon: float) -> np.ndarray:
    """M = (1 - e^2 + e^2 E_i (mu^i)^2) I + e^2 E_G B (x) conj(B), with mu^i = max_a mu^i_a."""
    require_dim("build_M", params.D * params.D, DIRECT_D_CAP**2)
    scalar = 1 - epsilon**2 + epsilon**2 * params.mean_mu_sq
    return scalar * np.eye(params.D * params.D) + epsilon**2 * expected_BB(params)


def build_O_succ(
    H: Hamiltonian,
    window: EnergyWindow,
    observables: ObservableSet,
    epsilon: float,
    config: QpeConfig,
    params: EthParams | None = None,
) -> SuccessOperator:
    """O_succ = (Q (x) Q)((1 - e^2) Pi (x) Pi + e^2 E_i Pi A_i Pi (x) Pi conj(A_i) Pi)(Q (x) Q).

    Built from the window blocks of the given observables (sampled average
    over i). With ``params`` the closed-form M and its Q-sandwich are added.
    """
    projector = window_projector(H, window)
    D = projector.D
    if D < 1:
        raise ContractViolation("build_O_succ", "window contains no eigenvalues")
    if D > DIRECT_D_CAP:
        raise DimensionCapError("build_O_succ", D, DIRECT_D_CAP)
    blocks = observables.window_blocks
    if blocks.shape[1] != D:
        raise ContractViolation(
            "build_O_succ", f"observable blocks have dimension {blocks.shape[1]}, window {D}"
        )
    q = weights_for(H.eigenvalues[list(projector.members)], config)
    qq = np.kron(q, q)
    core = (1 - epsilon**2) * np.eye(D * D) + epsilon**2 * second_moment(blocks)
    O = hermitize(qq[:, None] * core * qq[None, :])
    M = sandwiched = None
    if params is not None:
        if params.D != D:
            raise ContractViolation("build_O_succ", f"ensemble D={params.D} does not match window D={D}")
        M = build_M(params, epsilon)
        sandwiched = qq[:, None] * M * qq[None, :]
    return SuccessOperator(O, M, sandwiched, q, epsilon)


def sandwich(M: np.ndarray, q_window: np.ndarray) -> np.ndarray:
    """(Q (x) Q) M (Q (x) Q) for diagonal Q with the given window weights."""
    qq = np.kron(q_window, q_window)
    return qq[:, None] * M * qq[None, :]


def expected_acceptance(
    psi: Statevector, params: EthParams, epsilon: float, q_window: np.ndarray
) -> float:
    """Ensemble-averaged second-order acceptance of a window-coordinate input, in closed form.

    With Y = Q X Q for the input matrix X and y its diagonal, this is
    (1 - e^2 + e^2 E_i (mu^i)^2) ||Y||_F^2 + e^2 y^dagger M_f y: only the
    pair states |a, a> see the fluctuations.
    """
    X = _input_matrix(psi, params.D, "expected_acceptance")
    q = np.asarray(q_window, dtype=float)
    if q.shape != (params.D,):
        raise ContractViolation("expected_acceptance", f"need {params.D} window weights, got {q.shape}")
    Y = q[:, None] * X * q[None, :]
    y = np.diag(Y)
    scalar = 1 - epsilon**2 + epsilon**2 * params.mean_mu_sq
    frobenius = float(np.vdot(Y, Y).real)
    return scalar * frobenius + epsilon**2 * float(np.vdot(y, pair_restriction(params) @ y).real)


def unique_witness(op: SuccessOperator | np.ndarray) -> WitnessResult:
    """Top eigenpair and gap of the sandwiched operator (or of a bare Hermitian matrix).

    A gap below 1e-9 yields a degenerate result with no state.
    """
    if isinstance(op, SuccessOperator):
        if op.sandwiched is None:
            raise ContractViolation("unique_witness", "success operator was built without an ensemble")
        matrix = op.sandwiched
    else:
        matrix = np.asarray(op)
    values, vectors = top_eigenpairs(matrix, 2)
    top = float(values[-1])
    second = float(values[0]) if len(values) > 1 else -math.inf
    gap = top - second
    if gap < DEGENERACY_TOL:
        return WitnessResult(None, top, second, gap, True)
    state = vectors[:, -1]
    # fix the global phase: largest-magnitude entry real and positive
    pivot = state[np.argmax(np.abs(state))]
    state = state * (abs(pivot) / pivot)
    return WitnessResult(state, top, second, gap, False)


def no_case_norm(
    H: Hamiltonian,
    window: EnergyWindow,
    config: ProtocolConfig,
    observables: ObservableSet,
    c: float,
) -> tuple[float, float]:
    """(||(Q (x) Q)((1 - e^2) I + e^2 E_i A_i (x) conj(A_i))(Q (x) Q)||, 1/c).

    Every eigenvalue must lie at least c/L from the inner window (circularly);
    otherwise the instance is rejected. The norm is taken on the full doubled
    space, since the window projector vanishes on such spectra.
    """
    if c <= 0:
        raise ContractViolation("no_case_norm", f"c must be positive, got {c}")
    distance = almost_zero_margin(H.eigenvalues, config.qpe)
    closest = float(np.min(distance))
    if closest < c - 1e-9:
        raise PreconditionError(
            "no_case_norm",
            f"closest eigenvalue is {closest:.6g}/L from the inner window, need at least {c}/L",
        )
    if observables.mode != "circuit":
        raise ContractViolation("no_case_norm", "needs circuit-mode observables")
    return operator_norm(build_second_order(H, observables, config)), 1 / c


# ---------------------------------------------------------------------------
# Full report
# ---------------------------------------------------------------------------
def evaluate(
    psi: Statevector,
    H: Hamiltonian,
    window: EnergyWindow,
    observables: ObservableSet,
    config: ProtocolConfig,
) -> AcceptanceReport:
    """Both routes, the success operator's view of the input, and the Taylor residual (circuit mode)."""
    run = run_algorithm1(psi, H, observables, config)
    p_operator = acceptance_operator_route(psi, H, observables, config)
    p_second = second_order_amplitude(psi, H, observables, config)
    op = build_O_succ(H, window, observables, config.epsilon, config.qpe)
    X = window_coordinates(psi, H, window).reshape(-1)
    OX = op.O_succ @ X
    p_osucc = float(np.vdot(X, OX).real)
    values, vectors = top_eigenpairs(op.O_succ, 2)
    top = vectors[:, -1]
    gap = float(values[-1] - values[0]) if len(values) > 1 else 0.0
    return AcceptanceReport(
        p_circuit=run.p_circuit,
        p_operator=p_operator,
        p_osucc=p_osucc,
        p_osucc_amplitude=float(np.vdot(OX, OX).real),
        taylor_residual=abs(p_operator - p_second),
        lambda_top=float(values[-1]),
        gap=gap,
        overlap_top=float(abs(np.vdot(top, X)) ** 2),
        first_round_norm=run.first_round_norm,
        params={
            "epsilon": config.epsilon,
            "L": config.qpe.L,
            "m": observables.m,
            "dim_s": H.dim,
            "D": window_projector(H, window).D,
            "mode": observables.mode,
            "step_order": "project(SP, P), rotate, project(SP, P), measure T",
        },
    )
