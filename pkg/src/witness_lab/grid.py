"""Boundary: EnergyGrid, energy <-> integer grid index at resolution 1/L."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from witness_lab.types import ContractViolation

ALIGN_TOL = 1e-9


def circular_distance(x, y) -> np.ndarray:
    """Distance between phases modulo 1, in [0, 1/2]."""
    d = np.mod(np.asarray(x, dtype=float) - np.asarray(y, dtype=float), 1.0)
    return np.minimum(d, 1.0 - d)


@dataclass(frozen=True)
class EnergyGrid:
    """The lattice of energies m/L read out by phase estimation. Immutable.

    The resolution is set once at the boundary. Grid limits are integers;
    energies that should sit on the grid are checked, never rounded.
    """

    L: int

    def __post_init__(self) -> None:
        if not isinstance(self.L, (int, np.integer)) or self.L < 1:
            raise ContractViolation("EnergyGrid", f"L must be a positive integer, got {self.L!r}")

    @property
    def spacing(self) -> float:
        return 1.0 / self.L

    def to_index(self, energy: float) -> int:
        """Grid index of an energy that lies on the grid.

        Raises ContractViolation if the energy is not aligned to 1/L.
        """
        scaled = energy * self.L
        index = round(scaled)
        remainder = scaled - index
        if abs(remainder) > ALIGN_TOL:
            raise ContractViolation(
                "EnergyGrid.to_index",
                f"energy {energy!r} does not align to resolution 1/{self.L} "
                f"(remainder {remainder:.3g} grid units). "
                f"No implicit rounding: caller must ensure alignment.",
            )
        return int(index)

    def to_energy(self, index: int) -> float:
        return index / self.L

    def contains(self, energy: float) -> bool:
        return abs(energy * self.L - round(energy * self.L)) <= ALIGN_TOL

    def points(self, m_lo: int, m_hi: int) -> np.ndarray:
        """Energies m/L for m in [m_lo, m_hi]."""
        return np.arange(m_lo, m_hi + 1) / self.L

    def inner_limits(self, e0: float, delta: float) -> tuple[int, int]:
        """Integer limits (m_lo, m_hi) of the largest inner window of width at most delta - 1/sqrt(L).

        The window is centred on e0, which must lie on the grid.
        """
        center = self.to_index(e0)
        half = math.floor((delta - 1.0 / math.sqrt(self.L)) * self.L / 2 + ALIGN_TOL)
        if half < 1:
            raise ContractViolation(
                "EnergyGrid.inner_limits",
                f"delta={delta} leaves no inner width at L={self.L} "
                f"(need delta >= 1/sqrt(L) + 2/L = {1 / math.sqrt(self.L) + 2 / self.L:.6g})",
            )
        if 2 * half >= self.L:
            raise ContractViolation(
                "EnergyGrid.inner_limits",
                f"inner window of {2 * half + 1} grid points wraps around L={self.L}",
            )
        return center - half, center + half

    def distance_to_interval(self, energies, lower: float, upper: float) -> np.ndarray:
        """Circular distance from each energy to the closed interval [lower, upper], in grid units."""
        e = np.asarray(energies, dtype=float)
        width = upper - lower
        # offset of e above lower, modulo 1
        offset = np.mod(e - lower, 1.0)
        inside = offset <= width
        above = offset - width
        below = 1.0 - offset
        dist = np.where(inside, 0.0, np.minimum(above, below))
        return dist * self.L
