"""Shared types: errors, theorem violations and the reports passed between modules."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np


class ContractViolation(ValueError):
    """Raised when an operation is called outside its contract."""

    def __init__(self, operation: str, reason: str) -> None:
        self.operation = operation
        self.reason = reason
        super().__init__(f"{operation}: {reason}")


class DimensionCapError(ContractViolation):
    """Raised when a dense construction would exceed its dimension cap."""

    def __init__(self, operation: str, dimension: int, cap: int) -> None:
        self.dimension = dimension
        self.cap = cap
        super().__init__(
            operation,
            f"dimension {dimension} exceeds the dense cap of {cap}",
        )


class PreconditionError(ContractViolation):
    """Raised when an instance does not satisfy the hypothesis of a checked claim.

    The instance is rejected; this is not a violation of the claim.
    """


@dataclass(frozen=True)
class Violation:
    """One failed inequality, with everything needed to reproduce it."""

    claim: str
    seed: int | None
    measured: float
    bound: float
    detail: str = ""

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


class TheoremViolation(AssertionError):
    """Raised when a checked inequality fails on a generated instance."""

    def __init__(self, violation: Violation) -> None:
        self.violation = violation
        seed = "unseeded" if violation.seed is None else f"seed {violation.seed}"
        super().__init__(
            f"{violation.claim} violated ({seed}): measured {violation.measured!r}, "
            f"bound {violation.bound!r}"
            + (f" ({violation.detail})" if violation.detail else "")
        )


@dataclass
class ClaimLedger:
    """Collects violations instead of raising, for experiments that run many instances."""

    violations: list[Violation] = field(default_factory=list)
    checked: int = 0

    def record(self, violation: Violation) -> None:
        self.violations.append(violation)

    @property
    def passed(self) -> bool:
        return not self.violations


def check_claim(
    claim: str,
    holds: bool,
    measured: float,
    bound: float,
    *,
    seed: int | None = None,
    detail: str = "",
    ledger: ClaimLedger | None = None,
) -> bool:
    """Record one checked inequality.

    Without a ledger a failure raises TheoremViolation. With a ledger it is
    appended and the return value reports whether the claim held.
    """
    if ledger is not None:
        ledger.checked += 1
    if holds:
        return True
    violation = Violation(claim, seed, float(measured), float(bound), detail)
    if ledger is None:
        raise TheoremViolation(violation)
    ledger.record(violation)
    return False


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class AcceptanceReport:
    """Acceptance of one input state under both routes of the energy subspace test.

    p_osucc is the quadratic form of the success operator and
    p_osucc_amplitude its squared action; taylor_residual compares p_operator
    with the squared action of the second-order operator on the full space.
    """

    p_circuit: float
    p_operator: float
    p_osucc: float
    p_osucc_amplitude: float
    taylor_residual: float
    lambda_top: float
    gap: float
    overlap_top: float
    first_round_norm: float
    params: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True, eq=False)
class WitnessResult:
    """Top eigenpair of a success operator. state is None when the top space is degenerate."""

    state: np.ndarray | None
    lambda_top: float
    lambda_second: float
    gap: float
    degenerate: bool


@dataclass(frozen=True, eq=False)
class PerronReport:
    """Leading eigenpair of the pair-subspace matrix f^2/D."""

    lam: float
    vector: np.ndarray
    second: float
    ratio: float
    f: float
    D: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "lambda": self.lam,
            "second": self.second,
            "ratio": self.ratio,
            "f": self.f,
            "D": self.D,
        }


@dataclass(frozen=True)
class ConcentrationPoint:
    m: int
    median: float
    q25: float
    q75: float


@dataclass(frozen=True)
class ConcentrationCurve:
    """Median deviation of the sampled second moment from its expectation, per m."""

    points: tuple[ConcentrationPoint, ...]
    trials: int

    def __post_init__(self) -> None:
        ms = [p.m for p in self.points]
        if any(b <= a for a, b in zip(ms, ms[1:])):
            raise ContractViolation("ConcentrationCurve", f"m values not strictly increasing: {ms}")

    def median_at(self, m: int) -> float:
        for p in self.points:
            if p.m == m:
                return p.median
        raise KeyError(m)

    def ratios(self, step: int = 4) -> list[tuple[int, float]]:
        """Ratios median(m)/median(step*m) for every m whose multiple is on the curve."""
        by_m = {p.m: p.median for p in self.points}
        out: list[tuple[int, float]] = []
        for m, med in by_m.items():
            if step * m in by_m and by_m[step * m] > 0:
                out.append((m, med / by_m[step * m]))
        return out
