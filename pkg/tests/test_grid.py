"""Tests for EnergyGrid: energy <-> grid index and inner-window limits.

Test data loaded from: data/fixtures/scenarios/qpe.json
"""

from __future__ import annotations

import pytest

from conftest import load_scenarios

_data = load_scenarios("qpe")


class TestEnergyGridConstruction:
    @pytest.mark.parametrize("L", [0, -4, 2.5])
    def test_invalid_resolution(self, L):
        from witness_lab.grid import EnergyGrid
        from witness_lab.types import ContractViolation

        with pytest.raises(ContractViolation, match="positive integer"):
            EnergyGrid(L)

    def test_frozen(self):
        from dataclasses import FrozenInstanceError

        from witness_lab.grid import EnergyGrid

        grid = EnergyGrid(8)
        with pytest.raises(FrozenInstanceError):
            grid.L = 16


class TestIndexConversion:
    @pytest.mark.parametrize("spec", _data["grid_index"], ids=lambda s: s["id"])
    def test_to_index(self, spec):
        from witness_lab.grid import EnergyGrid

        grid = EnergyGrid(spec["L"])
        assert grid.to_index(spec["energy"]) == spec["expected"]
        assert grid.to_energy(spec["expected"]) == pytest.approx(spec["energy"])
        assert grid.contains(spec["energy"])

    @pytest.mark.parametrize("spec", _data["grid_misaligned"], ids=lambda s: s["id"])
    def test_misaligned_raises(self, spec):
        from witness_lab.grid import EnergyGrid
        from witness_lab.types import ContractViolation

        grid = EnergyGrid(spec["L"])
        assert not grid.contains(spec["energy"])
        with pytest.raises(ContractViolation, match="does not align"):
            grid.to_index(spec["energy"])

    def test_points(self):
        from witness_lab.grid import EnergyGrid

        assert list(EnergyGrid(8).points(3, 5)) == pytest.approx([0.375, 0.5, 0.625])


class TestInnerLimits:
    """inner_limits() centres the widest grid window of width <= delta - 1/sqrt(L) on e0."""

    @pytest.mark.parametrize("spec", _data["inner_limits"], ids=lambda s: s["id"])
    def test_limits(self, spec):
        from witness_lab.grid import EnergyGrid

        m_lo, m_hi = EnergyGrid(spec["L"]).inner_limits(spec["e0"], spec["delta"])
        assert (m_lo, m_hi) == (spec["m_lo"], spec["m_hi"])
        assert (m_hi - m_lo) / spec["L"] == pytest.approx(spec["omega"])
        assert (m_hi - m_lo) / spec["L"] <= spec["delta"] - spec["L"] ** -0.5

    @pytest.mark.parametrize("spec", _data["inner_limits_empty"], ids=lambda s: s["id"])
    def test_no_inner_width(self, spec):
        from witness_lab.grid import EnergyGrid
        from witness_lab.types import ContractViolation

        with pytest.raises(ContractViolation, match="no inner width"):
            EnergyGrid(spec["L"]).inner_limits(spec["e0"], spec["delta"])

    def test_wraps_around(self):
        from witness_lab.grid import EnergyGrid
        from witness_lab.types import ContractViolation

        with pytest.raises(ContractViolation, match="wraps"):
            EnergyGrid(16).inner_limits(0.5, 1.3)

    def test_centre_off_grid(self):
        from witness_lab.grid import EnergyGrid
        from witness_lab.types import ContractViolation

        with pytest.raises(ContractViolation, match="does not align"):
            EnergyGrid(16).inner_limits(0.51, 0.5)


class TestCircularDistance:
    def test_wraps(self):
        from witness_lab.grid import circular_distance

        assert float(circular_distance(0.05, 0.95)) == pytest.approx(0.1)
        assert float(circular_distance(0.2, 0.2)) == 0.0
        assert float(circular_distance(0.0, 0.5)) == pytest.approx(0.5)

    @pytest.mark.parametrize(
        "energy,expected",
        [(0.5, 0.0), (0.375, 0.0), (0.75, 2.0), (0.0, 6.0), (0.95, 5.2)],
        ids=["inside", "edge", "above", "equidistant", "wrapped"],
    )
    def test_distance_to_interval(self, energy, expected):
        from witness_lab.grid import EnergyGrid

        d = EnergyGrid(16).distance_to_interval([energy], 0.375, 0.625)
        assert float(d[0]) == pytest.approx(expected, abs=1e-9)
