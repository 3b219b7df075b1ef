"""Subspace reflection oracles and the verifiers built from them.

O_S = I - 2 Pi_S reflects a subspace given by an orthonormal basis. The
controlled form O^Pi = (I - Pi) (x) I + Pi (x) O acts with the control
register first. Everything here is dense and capped at N = 256.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.stats import unitary_group

from witness_lab.linalg import eigh, hermitize, kron, operator_norm
from witness_lab.rng import stream_rng
from witness_lab.types import (
    ClaimLedger,
    ContractViolation,
    DimensionCapError,
    PreconditionError,
    check_claim,
)

logger = logging.getLogger(__name__)

ORACLE_CAP = 256
ORACLE_TOL = 1e-10
COUNT_TOL = 1e-10
SUBSPACE_STREAM = 40

PLUS = np.array([1, 1], dtype=np.complex128) / math.sqrt(2)
MINUS = np.array([1, -1], dtype=np.complex128) / math.sqrt(2)
CONTROL_ZERO = np.diag([1.0, 0.0]).astype(np.complex128)


@dataclass(frozen=True, eq=False)
class SubspaceOracle:
    """Reflection O_S = I - 2 Pi_S about the span of ``basis`` (an N x k isometry)."""

    N: int
    basis: np.ndarray
    matrix: np.ndarray
    projector: np.ndarray

    @classmethod
    def from_basis(cls, basis) -> SubspaceOracle:
        B = np.asarray(basis, dtype=np.complex128)
        if B.ndim != 2:
            raise ContractViolation("SubspaceOracle", f"basis must be N x k, got shape {B.shape}")
        N, k = B.shape
        if N > ORACLE_CAP:
            raise DimensionCapError("SubspaceOracle", N, ORACLE_CAP)
        if k > N:
            raise ContractViolation("SubspaceOracle", f"{k} basis vectors in dimension {N}")
        if k and np.max(np.abs(B.conj().T @ B - np.eye(k))) > ORACLE_TOL:
            raise ContractViolation("SubspaceOracle", "basis is not orthonormal")
        projector = hermitize(B @ B.conj().T)
        matrix = np.eye(N) - 2 * projector
        for arr in (B, projector, matrix):
            arr.setflags(write=False)
        return cls(N, B, matrix, projector)

    @classmethod
    def identity(cls, N: int) -> SubspaceOracle:
        """The oracle of the empty subspace."""
        return cls.from_basis(np.zeros((N, 0)))

    @property
    def k(self) -> int:
        return self.basis.shape[1]

    def unitarity_defect(self) -> float:
        return float(np.max(np.abs(self.matrix @ self.matrix.conj().T - np.eye(self.N))))


@dataclass(frozen=True, eq=False)
class ControlledOracle:
    """O^Pi on control (x) system: O where the control projector is on, identity elsewhere."""

    oracle: SubspaceOracle
    control: np.ndarray
    matrix: np.ndarray

    @classmethod
    def lift(cls, oracle: SubspaceOracle, control=None) -> ControlledOracle:
        Pi = CONTROL_ZERO if control is None else np.asarray(control, dtype=np.complex128)
        if Pi.ndim != 2 or Pi.shape[0] != Pi.shape[1]:
            raise ContractViolation("ControlledOracle", f"control projector must be square, got {Pi.shape}")
        if np.max(np.abs(Pi @ Pi - Pi)) > ORACLE_TOL or np.max(np.abs(Pi - Pi.conj().T)) > ORACLE_TOL:
            raise ContractViolation("ControlledOracle", "control is not an orthogonal projector")
        if Pi.shape[0] * oracle.N > ORACLE_CAP * 2:
            raise DimensionCapError("ControlledOracle", Pi.shape[0] * oracle.N, ORACLE_CAP * 2)
        eye_c = np.eye(Pi.shape[0])
        matrix = kron(eye_c - Pi, np.eye(oracle.N)) + kron(Pi, oracle.matrix)
        matrix.setflags(write=False)
        return cls(oracle, Pi, matrix)

    @property
    def control_dim(self) -> int:
        return self.control.shape[0]

    @property
    def reflected_projector(self) -> np.ndarray:
        """Pi (x) Pi_S: the subspace O^Pi actually reflects."""
        return kron(self.control, self.oracle.projector)

    @property
    def system_projector(self) -> np.ndarray:
        """I (x) Pi_S."""
        return kron(np.eye(self.control_dim), self.oracle.projector)


# ---------------------------------------------------------------------------
# Subspace sampling
# ---------------------------------------------------------------------------
def _orthonormal_columns(G: np.ndarray) -> np.ndarray:
    Qm, R = np.linalg.qr(G)
    # fix column phases so the factorisation is unique
    phases = np.diag(R) / np.abs(np.diag(R))
    return Qm * phases


def random_subspace(N: int, k: int, seed: int, *keys: int) -> SubspaceOracle:
    """Haar-random k-dimensional subspace from the QR factor of a seeded complex Gaussian N x k matrix."""
    if N > ORACLE_CAP:
        raise DimensionCapError("random_subspace", N, ORACLE_CAP)
    if not 0 <= k <= N:
        raise ContractViolation("random_subspace", f"need 0 <= k <= N, got k={k}, N={N}")
    if k == 0:
        return SubspaceOracle.identity(N)
    rng = stream_rng(seed, SUBSPACE_STREAM, *keys)
    G = rng.standard_normal((N, k)) + 1j * rng.standard_normal((N, k))
    return SubspaceOracle.from_basis(_orthonormal_columns(G))


def orthogonal_extension(S: SubspaceOracle, k: int, seed: int, *keys: int) -> SubspaceOracle:
    """Random k-dimensional subspace Delta orthogonal to S."""
    if S.k + k > S.N:
        raise ContractViolation("orthogonal_extension", f"dim S + k = {S.k + k} exceeds N = {S.N}")
    if k == 0:
        return SubspaceOracle.identity(S.N)
    rng = stream_rng(seed, SUBSPACE_STREAM + 1, *keys)
    G = rng.standard_normal((S.N, k)) + 1j * rng.standard_normal((S.N, k))
    G = G - S.projector @ G
    return SubspaceOracle.from_basis(_orthonormal_columns(G))


def direct_sum(S: SubspaceOracle, Delta: SubspaceOracle) -> SubspaceOracle:
    """T = S (+) Delta for orthogonal subspaces."""
    if S.N != Delta.N:
        raise ContractViolation("direct_sum", f"dimensions differ: {S.N} and {Delta.N}")
    if S.k and Delta.k and np.max(np.abs(S.basis.conj().T @ Delta.basis)) > ORACLE_TOL:
        raise ContractViolation("direct_sum", "subspaces are not orthogonal")
    return SubspaceOracle.from_basis(np.hstack([S.basis, Delta.basis]))


def compose(first: SubspaceOracle, second: SubspaceOracle) -> np.ndarray:
    """The product O_first O_second."""
    if first.N != second.N:
        raise ContractViolation("compose", f"dimensions differ: {first.N} and {second.N}")
    return first.matrix @ second.matrix


def composition_defect(S: SubspaceOracle, Delta: SubspaceOracle) -> float:
    """|| O_S O_Delta - O_{S (+) Delta} ||."""
    return operator_norm(compose(S, Delta) - direct_sum(S, Delta).matrix)


# ---------------------------------------------------------------------------
# Verifiers
# ---------------------------------------------------------------------------
def _normalised(witness, dim: int, operation: str) -> np.ndarray:
    psi = np.asarray(witness, dtype=np.complex128).reshape(-1)
    if psi.size != dim:
        raise ContractViolation(operation, f"witness has dimension {psi.size}, expected {dim}")
    if abs(np.vdot(psi, psi).real - 1) > ORACLE_TOL:
        raise ContractViolation(operation, "witness is not normalised")
    return psi


def simple_verifier(oracle: SubspaceOracle, witness) -> float:
    """Probability of the |-> outcome after controlled-O on |+>|psi> and a Hadamard-basis measurement.

    Equals ||Pi_S psi||^2.
    """
    psi = _normalised(witness, oracle.N, "simple_verifier")
    controlled = ControlledOracle.lift(oracle)
    out = controlled.matrix @ np.kron(PLUS, psi)
    accepted = np.kron(MINUS.conj(), np.eye(oracle.N)) @ out
    return float(np.vdot(accepted, accepted).real)


@dataclass(frozen=True, eq=False)
class VerifierInstance:
    """A one-query verifier Pi_out O Pi_in together with a candidate witness."""

    pi_out: np.ndarray
    pi_in: np.ndarray
    oracle: ControlledOracle
    witness: np.ndarray


def simple_verifier_instance(oracle: SubspaceOracle, psi) -> VerifierInstance:
    """The simple verifier written as Pi_out O^Pi Pi_in on control (x) system, with witness |+>|psi>."""
    psi = _normalised(psi, oracle.N, "simple_verifier_instance")
    eye = np.eye(oracle.N)
    return VerifierInstance(
        pi_out=kron(np.outer(MINUS, MINUS.conj()), eye),
        pi_in=kron(np.outer(PLUS, PLUS.conj()), eye),
        oracle=ControlledOracle.lift(oracle),
        witness=np.kron(PLUS, psi),
    )


def haar_verifier_instance(oracle: SubspaceOracle, tilt: float, seed: int, *keys: int) -> VerifierInstance:
    """A one-query verifier with Haar-random input and output frames on control (x) system.

    Pi_in = U_0 (|0><0| (x) I) U_0^dagger for a Haar U_0, and the witness is
    the normalised Pi_in part of a random state in the reflected subspace.
    Pi_out = U_L^dagger (|1><1| (x) I) U_L, where U_L carries one accepting
    direction (the part of O w orthogonal to w, turned toward w by ``tilt``
    radians) and Haar directions orthogonal to w and O w elsewhere. Soundness
    is then sin(tilt); completeness depends on how much of w the oracle
    reflects.
    """
    if oracle.k == 0:
        raise ContractViolation("haar_verifier_instance", "needs dim S > 0")
    if not 0 <= tilt <= math.pi / 2:
        raise ContractViolation("haar_verifier_instance", f"tilt must be in [0, pi/2], got {tilt}")
    controlled = ControlledOracle.lift(oracle)
    N = oracle.N
    dim = controlled.control_dim * N
    eye = np.eye(N)
    zero_half = kron(CONTROL_ZERO, eye)
    one_half = np.eye(dim) - zero_half

    U_0 = unitary_group.rvs(dim, random_state=stream_rng(seed, SUBSPACE_STREAM + 3, *keys))
    pi_in = hermitize(U_0 @ zero_half @ U_0.conj().T)
    rng = stream_rng(seed, SUBSPACE_STREAM + 4, *keys)
    target = controlled.reflected_projector @ (rng.standard_normal(dim) + 1j * rng.standard_normal(dim))
    w = pi_in @ target
    w /= np.linalg.norm(w)

    Ow = controlled.matrix @ w
    accepting = Ow - np.vdot(w, Ow) * w
    size = np.linalg.norm(accepting)
    if size <= ORACLE_TOL:
        raise PreconditionError("haar_verifier_instance", "O w is parallel to w")
    accepting /= size
    lead = math.cos(tilt) * accepting + math.sin(tilt) * w

    haar = unitary_group.rvs(dim, random_state=stream_rng(seed, SUBSPACE_STREAM + 5, *keys))
    plane = np.column_stack([w, accepting])
    rest = haar - plane @ (plane.conj().T @ haar)
    accepted = np.column_stack([lead, _orthonormal_columns(rest[:, : N - 1])]) if N > 1 else lead[:, None]
    outside = haar - accepted @ (accepted.conj().T @ haar)
    rejected = _orthonormal_columns(outside[:, N - 1 : 2 * N - 1])
    U_L = np.column_stack([rejected, accepted]).conj().T
    pi_out = hermitize(U_L.conj().T @ one_half @ U_L)
    return VerifierInstance(pi_out=pi_out, pi_in=pi_in, oracle=controlled, witness=w)


def verifier_margins(
    pi_out: np.ndarray, pi_in: np.ndarray, oracle: ControlledOracle, witness
) -> tuple[float, float]:
    """(completeness, soundness) = (||Pi_out O Pi_in w||, ||Pi_out Pi_in w||)."""
    w = _normalised(witness, oracle.matrix.shape[0], "verifier_margins")
    inside = pi_in @ w
    return float(np.linalg.norm(pi_out @ oracle.matrix @ inside)), float(np.linalg.norm(pi_out @ inside))


def tightest_epsilon(instance: VerifierInstance) -> float:
    """Smallest epsilon at which the instance is complete and sound."""
    completeness, soundness = verifier_margins(
        instance.pi_out, instance.pi_in, instance.oracle, instance.witness
    )
    return max(1 - completeness**2, soundness**2, 0.0)


def overlap_bound_check(
    pi_out: np.ndarray,
    pi_in: np.ndarray,
    oracle: ControlledOracle,
    witness,
    epsilon: float,
    *,
    seed: int | None = None,
    ledger: ClaimLedger | None = None,
) -> tuple[float, float]:
    """(||Pi_S w||, delta) with delta = (sqrt(1 - e) - sqrt(e))/2, the bound checked.

    The witness must lie in Pi_in, pass completeness ||Pi_out O Pi_in w|| >=
    sqrt(1 - e) and soundness ||Pi_out Pi_in w|| <= sqrt(e) against the
    identity oracle; otherwise the instance is rejected with
    PreconditionError. The system overlap ||(I (x) Pi_S) w||, the reflected
    overlap ||(Pi (x) Pi_S) w|| and the accepted part of it,
    ||Pi_out (Pi (x) Pi_S) w||, are each checked against delta.
    """
    if not 0 <= epsilon < 0.5:
        raise ContractViolation("overlap_bound_check", f"epsilon must be in [0, 0.5), got {epsilon}")
    dim = oracle.matrix.shape[0]
    w = _normalised(witness, dim, "overlap_bound_check")
    if np.linalg.norm(pi_in @ w - w) > ORACLE_TOL:
        raise PreconditionError("overlap_bound_check", "witness is not in the range of Pi_in")
    completeness, soundness = verifier_margins(pi_out, pi_in, oracle, w)
    if completeness < math.sqrt(1 - epsilon) - ORACLE_TOL:
        raise PreconditionError(
            "overlap_bound_check",
            f"completeness {completeness:.6g} < sqrt(1 - eps) = {math.sqrt(1 - epsilon):.6g}",
        )
    if soundness > math.sqrt(epsilon) + ORACLE_TOL:
        raise PreconditionError(
            "overlap_bound_check", f"soundness {soundness:.6g} > sqrt(eps) = {math.sqrt(epsilon):.6g}"
        )
    delta = (math.sqrt(1 - epsilon) - math.sqrt(epsilon)) / 2
    lhs = float(np.linalg.norm(oracle.system_projector @ w))
    reflected = float(np.linalg.norm(oracle.reflected_projector @ w))
    projected = float(np.linalg.norm(pi_out @ oracle.reflected_projector @ w))
    check_claim("delta_lower_bound.overlap", lhs >= delta - ORACLE_TOL, lhs, delta, seed=seed, ledger=ledger)
    check_claim(
        "delta_lower_bound.projected",
        projected >= delta - ORACLE_TOL,
        projected,
        delta,
        seed=seed,
        ledger=ledger,
    )
    check_claim(
        "delta_lower_bound.reflected",
        reflected >= delta - ORACLE_TOL,
        reflected,
        delta,
        seed=seed,
        ledger=ledger,
    )
    return lhs, delta


def near_ideal_witness(oracle: SubspaceOracle, leak: float, seed: int, *keys: int) -> np.ndarray:
    """Unit vector with ||Pi_S psi||^2 = 1 - leak: a random direction in S mixed with one outside it."""
    if oracle.k == 0 or oracle.k == oracle.N:
        raise ContractViolation("near_ideal_witness", "needs 0 < dim S < N")
    if not 0 <= leak <= 1:
        raise ContractViolation("near_ideal_witness", f"leak must be in [0, 1], got {leak}")
    rng = stream_rng(seed, SUBSPACE_STREAM + 2, *keys)
    inner = oracle.basis @ (rng.standard_normal(oracle.k) + 1j * rng.standard_normal(oracle.k))
    inner /= np.linalg.norm(inner)
    outer = rng.standard_normal(oracle.N) + 1j * rng.standard_normal(oracle.N)
    outer -= oracle.projector @ outer
    outer /= np.linalg.norm(outer)
    return math.sqrt(1 - leak) * inner + math.sqrt(leak) * outer


# ---------------------------------------------------------------------------
# Approximate counting
# ---------------------------------------------------------------------------
def qxc_acceptance_operator(oracle: SubspaceOracle) -> np.ndarray:
    """V^dagger V on the witness space for the counting verifier: <+| O^Pi^dagger (|-><-| (x) I) O^Pi |+>."""
    controlled = ControlledOracle.lift(oracle)
    embed = np.kron(PLUS[:, None], np.eye(oracle.N))
    accept = kron(np.outer(MINUS, MINUS.conj()), np.eye(oracle.N))
    V = accept @ controlled.matrix @ embed
    return hermitize(V.conj().T @ V)


def qxc_dimension_count(oracle: SubspaceOracle, a: float, b: float) -> tuple[int, int]:
    """(D_a, D_b): eigenvalue counts of V^dagger V at or above a and b."""
    if not a > b:
        raise ContractViolation("qxc_dimension_count", f"need a > b, got a={a}, b={b}")
    values = eigh(qxc_acceptance_operator(oracle)).eigenvalues
    D_a = int(np.count_nonzero(values >= a - COUNT_TOL))
    D_b = int(np.count_nonzero(values >= b - COUNT_TOL))
    return D_a, D_b


@dataclass(frozen=True)
class QxcDecision:
    D_a: int
    D_b: int
    epsilon: float
    estimate: float
    verdict: Literal["yes", "no"]


def qxc_decide(oracle: SubspaceOracle, k1: int, k2: int, a: float = 2 / 3, b: float = 1 / 3) -> QxcDecision:
    """Decide dim S = k1 (yes) against dim S = k2 (no) from one approximate count.

    With e = (k2 - k1)/(2 k2) the admissible estimates [(1 - e) D_a, (1 + e) D_b]
    of the two cases are separated at (k1 + k2)/2.
    """
    if not 0 < k1 < k2 <= oracle.N:
        raise ContractViolation("qxc_decide", f"need 0 < k1 < k2 <= N, got k1={k1}, k2={k2}, N={oracle.N}")
    D_a, D_b = qxc_dimension_count(oracle, a, b)
    epsilon = (k2 - k1) / (2 * k2)
    estimate = float(D_a)
    verdict: Literal["yes", "no"] = "yes" if estimate < (k1 + k2) / 2 else "no"
    logger.debug("qxc_decide: D_a=%d D_b=%d eps=%.4f verdict=%s", D_a, D_b, epsilon, verdict)
    return QxcDecision(D_a, D_b, epsilon, estimate, verdict)
