"""Dense complex linear algebra: eigendecomposition, norms, exponentials and register-labelled states.

Every norm, exponential and projector in the package goes through ``eigh``.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from functools import reduce
from math import prod

import numpy as np
import scipy.linalg

from witness_lab.types import ContractViolation, DimensionCapError

DENSE_CAP = 4096
HERMITIAN_RTOL = 1e-12
NORM_SLACK = 1e-12


def require_dim(operation: str, dimension: int, cap: int = DENSE_CAP) -> None:
    """Raise DimensionCapError when a dense object would be larger than ``cap``."""
    if dimension > cap:
        raise DimensionCapError(operation, dimension, cap)


def as_matrix(M, operation: str = "as_matrix") -> np.ndarray:
    arr = np.asarray(M, dtype=np.complex128)
    if arr.ndim != 2:
        raise ContractViolation(operation, f"expected a 2-d matrix, got shape {arr.shape}")
    return arr


def is_hermitian(M, rtol: float = HERMITIAN_RTOL) -> bool:
    arr = np.asarray(M)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        return False
    scale = np.max(np.abs(arr)) if arr.size else 0.0
    if scale == 0.0:
        return True
    return bool(np.max(np.abs(arr - arr.conj().T)) <= rtol * scale)


def hermitize(M: np.ndarray) -> np.ndarray:
    """Average M with its adjoint, removing roundoff asymmetry."""
    return (M + M.conj().T) / 2


@dataclass(frozen=True, eq=False)
class EigenDecomposition:
    """Ascending real eigenvalues and a unitary matrix of eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)

    def reconstruct(self) -> np.ndarray:
        V = self.eigenvectors
        return (V * self.eigenvalues) @ V.conj().T

    def apply_function(self, values: np.ndarray) -> np.ndarray:
        """V diag(values) V^dagger for values indexed like the eigenvalues."""
        V = self.eigenvectors
        return (V * values) @ V.conj().T


def eigh(M, *, check: bool = True) -> EigenDecomposition:
    """Hermitian eigendecomposition with ascending eigenvalues.

    Raises ContractViolation for non-Hermitian input when ``check`` is set.
    """
    arr = as_matrix(M, "eigh")
    if check and not is_hermitian(arr):
        raise ContractViolation("eigh", "input is not Hermitian")
    require_dim("eigh", arr.shape[0])
    if arr.shape[0] == 0:
        return EigenDecomposition(np.zeros(0), np.zeros((0, 0), dtype=np.complex128))
    values, vectors = scipy.linalg.eigh(hermitize(arr))
    return EigenDecomposition(values, vectors)


def top_eigenpairs(M, k: int = 2) -> tuple[np.ndarray, np.ndarray]:
    """The k largest eigenvalues (ascending) and their eigenvectors."""
    arr = hermitize(as_matrix(M, "top_eigenpairs"))
    n = arr.shape[0]
    k = min(k, n)
    values, vectors = scipy.linalg.eigh(arr, subset_by_index=[n - k, n - 1])
    return values, vectors


def operator_norm(M) -> float:
    """Largest singular value.

    Hermitian input uses max |eigenvalue|; anything else uses the square root
    of the top eigenvalue of M^dagger M.
    """
    arr = as_matrix(M, "operator_norm")
    if arr.size == 0 or not np.any(arr):
        return 0.0
    if arr.shape[0] == arr.shape[1] and is_hermitian(arr):
        values = eigh(arr, check=False).eigenvalues
        return float(max(abs(values[0]), abs(values[-1])))
    gram = arr.conj().T @ arr if arr.shape[1] <= arr.shape[0] else arr @ arr.conj().T
    top = eigh(gram, check=False).eigenvalues[-1]
    return float(np.sqrt(max(top, 0.0)))


def kron(*ops) -> np.ndarray:
    """Kronecker product of one or more matrices, left to right."""
    if not ops:
        raise ContractViolation("kron", "needs at least one operand")
    mats = [as_matrix(op, "kron") for op in ops]
    require_dim("kron", prod(m.shape[0] for m in mats), DENSE_CAP * 4)
    return reduce(np.kron, mats)


def expm_i(A, theta: float) -> np.ndarray:
    """e^{i theta A} for Hermitian A."""
    dec = A if isinstance(A, EigenDecomposition) else eigh(A)
    return dec.apply_function(np.exp(1j * theta * dec.eigenvalues))


def conjugate_in_basis(A, basis: np.ndarray) -> np.ndarray:
    """Entrywise complex conjugate of A taken in the orthonormal basis given by columns of ``basis``."""
    arr = as_matrix(A, "conjugate_in_basis")
    if basis.shape[0] != arr.shape[0]:
        raise ContractViolation(
            "conjugate_in_basis", f"basis has {basis.shape[0]} rows, operator is {arr.shape[0]}"
        )
    inner = basis.conj().T @ arr @ basis
    return basis @ inner.conj() @ basis.conj().T


# ---------------------------------------------------------------------------
# Statevectors with named registers
# ---------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class Statevector:
    """Amplitudes over an ordered tensor product of named registers.

    Sub-normalised states are allowed; post-selection only ever removes norm.
    """

    layout: tuple[tuple[str, int], ...]
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        names = [name for name, _ in self.layout]
        if len(set(names)) != len(names):
            raise ContractViolation("Statevector", f"duplicate register names in {names}")
        if any(d < 1 for _, d in self.layout):
            raise ContractViolation("Statevector", f"register dimensions must be positive: {self.layout}")
        amps = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amps.size != prod(self.dims):
            raise ContractViolation(
                "Statevector",
                f"{amps.size} amplitudes for layout of dimension {prod(self.dims)}",
            )
        norm_sq = float(np.vdot(amps, amps).real)
        if norm_sq > 1 + NORM_SLACK:
            raise ContractViolation("Statevector", f"squared norm {norm_sq} exceeds 1")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_vector(cls, name: str, vector) -> Statevector:
        vec = np.asarray(vector, dtype=np.complex128).reshape(-1)
        return cls(((name, vec.size),), vec)

    @classmethod
    def product(cls, *parts: tuple[str, np.ndarray]) -> Statevector:
        """Tensor product of single-register vectors, in the order given."""
        layout = tuple((name, np.asarray(vec).size) for name, vec in parts)
        amps = reduce(np.kron, [np.asarray(vec, dtype=np.complex128).reshape(-1) for _, vec in parts])
        return cls(layout, amps)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.layout)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(d for _, d in self.layout)

    def norm_sq(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.dims)

    def axis(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise ContractViolation("Statevector", f"no register named {name!r} in {self.names}") from None

    def with_tensor(self, tensor: np.ndarray) -> Statevector:
        return Statevector(self.layout, tensor.reshape(-1))

    def append(self, name: str, vector) -> Statevector:
        """Tensor a fresh register onto the end of the layout."""
        vec = np.asarray(vector, dtype=np.complex128).reshape(-1)
        return Statevector(self.layout + ((name, vec.size),), np.kron(self.amplitudes, vec))


def _target_axes(state: Statevector, targets: Sequence[str], operation: str) -> list[int]:
    if len(set(targets)) != len(targets):
        raise ContractViolation(operation, f"repeated target registers {list(targets)}")
    return [state.axis(t) for t in targets]


def _apply_on_axes(U: np.ndarray, axes: list[int], tensor: np.ndarray, operation: str) -> np.ndarray:
    t_dims = [tensor.shape[a] for a in axes]
    t_size = prod(t_dims)
    if U.shape != (t_size, t_size):
        raise ContractViolation(
            operation,
            f"operator shape {U.shape} does not match target dimension {t_size}",
        )
    k = len(axes)
    Ur = U.reshape(t_dims + t_dims)
    moved = np.tensordot(Ur, tensor, axes=(list(range(k, 2 * k)), axes))
    # tensordot puts the target axes first; restore the layout order
    return np.moveaxis(moved, list(range(k)), axes)


def apply_to_register(U, targets: Sequence[str] | str, state: Statevector) -> Statevector:
    """Apply an operator on the listed registers, identity elsewhere.

    The operator's row index runs over the targets in the order listed.
    """
    if isinstance(targets, str):
        targets = (targets,)
    U = as_matrix(U, "apply_to_register")
    axes = _target_axes(state, targets, "apply_to_register")
    return state.with_tensor(_apply_on_axes(U, axes, state.tensor(), "apply_to_register"))


def apply_controlled(
    blocks: Sequence[np.ndarray],
    control: str,
    targets: Sequence[str] | str,
    state: Statevector,
) -> Statevector:
    """Apply ``blocks[k]`` to the targets on the branch where the control register holds k."""
    if isinstance(targets, str):
        targets = (targets,)
    if control in targets:
        raise ContractViolation("apply_controlled", "control register cannot be a target")
    c_axis = state.axis(control)
    if len(blocks) != state.dims[c_axis]:
        raise ContractViolation(
            "apply_controlled",
            f"{len(blocks)} blocks for control register of dimension {state.dims[c_axis]}",
        )
    axes = _target_axes(state, targets, "apply_controlled")
    # index of each target once the control axis is moved to the end
    shifted = [a if a < c_axis else a - 1 for a in axes]
    tensor = np.moveaxis(state.tensor(), c_axis, -1)
    out = np.empty_like(tensor)
    for k, block in enumerate(blocks):
        out[..., k] = _apply_on_axes(as_matrix(block), shifted, tensor[..., k], "apply_controlled")
    return state.with_tensor(np.moveaxis(out, -1, c_axis))


def permute_registers(state: Statevector, order: Sequence[str]) -> Statevector:
    """Reorder the layout. Reversible: permuting back restores the original amplitudes."""
    if sorted(order) != sorted(state.names):
        raise ContractViolation(
            "permute_registers", f"order {list(order)} is not a permutation of {state.names}"
        )
    axes = [state.axis(name) for name in order]
    layout = tuple(state.layout[a] for a in axes)
    return Statevector(layout, np.transpose(state.tensor(), axes).reshape(-1))


def project_register(vector, target: str, state: Statevector) -> Statevector:
    """Post-select one register on a normalised vector and drop it from the layout."""
    vec = np.asarray(vector, dtype=np.complex128).reshape(-1)
    axis = state.axis(target)
    reduced = np.tensordot(vec.conj(), state.tensor(), axes=([0], [axis]))
    layout = tuple(entry for entry in state.layout if entry[0] != target)
    return Statevector(layout, reduced.reshape(-1))


def lift(U, targets: Sequence[str] | str, layout: Sequence[tuple[str, int]]) -> np.ndarray:
    """Dense matrix of U acting on ``targets`` inside the full register layout."""
    if isinstance(targets, str):
        targets = (targets,)
    layout = tuple(layout)
    names = [name for name, _ in layout]
    dims = [d for _, d in layout]
    size = prod(dims)
    require_dim("lift", size)
    try:
        axes = [names.index(t) for t in targets]
    except ValueError:
        raise ContractViolation("lift", f"targets {list(targets)} not all in layout {names}") from None
    # columns of the identity, with the column index as a trailing axis
    identity = np.eye(size, dtype=np.complex128).reshape(dims + [size])
    out = _apply_on_axes(as_matrix(U, "lift"), axes, identity, "lift")
    return out.reshape(size, size)
