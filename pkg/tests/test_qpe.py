"""Tests for phase estimation: sinc kernels, Q(H), U_QPE and Pi_SP.

Test data loaded from: data/fixtures/scenarios/qpe.json
"""

from __future__ import annotations

import numpy as np
import pytest

from conftest import SEEDS, SMALL, TOL, load_scenarios, make_hamiltonian, make_qpe, make_window

_data = load_scenarios("qpe")


class TestSinc:
    @pytest.mark.parametrize("spec", _data["sinc"], ids=lambda s: s["id"])
    def test_values(self, spec):
        from witness_lab.qpe import sinc_L

        assert sinc_L(spec["x"], spec["L"]) == pytest.approx(spec["expected"], abs=1e-12)

    def test_vectorised(self):
        from witness_lab.qpe import sinc_L

        out = sinc_L(np.array([0.0, 0.5]), 4)
        assert out.shape == (2,)
        assert out == pytest.approx([1.0, 0.0], abs=1e-12)

    @pytest.mark.parametrize("L", [4, 16, 64])
    def test_full_grid_sums_to_one(self, L):
        """Summed over all L grid points the squared kernel is a probability distribution."""
        from witness_lab.qpe import sinc_L

        for lam in (0.0, 0.123, 0.5, 0.871):
            total = np.sum(sinc_L(lam - np.arange(L) / L, L) ** 2)
            assert total == pytest.approx(1.0, abs=1e-10)


class TestQpeConfig:
    @pytest.mark.parametrize("spec", _data["inner_limits"], ids=lambda s: s["id"])
    def test_for_window(self, spec):
        qc = make_qpe(spec["L"], make_window(spec["e0"], spec["delta"]))
        assert (qc.m_lo, qc.m_hi) == (spec["m_lo"], spec["m_hi"])
        assert qc.omega == pytest.approx(spec["omega"])
        assert qc.grid_count == spec["m_hi"] - spec["m_lo"] + 1
        assert qc.inner_lower == pytest.approx(spec["m_lo"] / spec["L"])

    def test_zero_width(self):
        from witness_lab.qpe import QpeConfig
        from witness_lab.types import ContractViolation

        with pytest.raises(ContractViolation, match="omega"):
            QpeConfig(16, make_window(), 8, 8)

    def test_too_many_points(self):
        from witness_lab.qpe import QpeConfig
        from witness_lab.types import ContractViolation

        with pytest.raises(ContractViolation, match="do not fit"):
            QpeConfig(8, make_window(), 0, 8)


class TestQWeights:
    """q_a = sum_m sinc_L(lambda_a - m/L)^2 over the inner grid."""

    @pytest.mark.parametrize("spec", _data["on_grid_weights"], ids=lambda s: s["id"])
    def test_grid_eigenvalues(self, spec):
        from witness_lab.qpe import weights_for

        qc = make_qpe(spec["L"], make_window(spec["e0"], spec["delta"]))
        assert weights_for([spec["eigenvalue"]], qc)[0] == pytest.approx(spec["expected"], abs=1e-12)

    def test_operator_is_diagonal_in_eigenbasis(self, small_qpe):
        from witness_lab.qpe import q_weights

        H = make_hamiltonian(basis="random", seed=4)
        Q = q_weights(H, small_qpe)
        V = H.eigenvectors
        diag = V.conj().T @ Q.matrix @ V
        assert np.max(np.abs(diag - np.diag(Q.weights))) < TOL["operator"]
        assert np.all(Q.weights <= 1 + 1e-10)
        assert np.all(Q.weights >= 0)

    @pytest.mark.parametrize("k", range(-3, 4))
    def test_grid_translation(self, k):
        """Moving the spectrum and e0 together by k/L leaves every weight unchanged."""
        from witness_lab.qpe import weights_for

        L = 16
        spectrum = np.array(SMALL["spectrum"])
        base = make_qpe(L, make_window(0.5, 0.5))
        moved = make_qpe(L, make_window(0.5 + k / L, 0.5))
        assert (moved.m_lo, moved.m_hi) == (base.m_lo + k, base.m_hi + k)
        assert np.allclose(weights_for(spectrum + k / L, moved), weights_for(spectrum, base), atol=1e-10)

    def test_no_violation_recorded(self, small_hamiltonian, small_qpe, ledger):
        from witness_lab.qpe import q_weights

        q_weights(small_hamiltonian, small_qpe, ledger=ledger)
        assert ledger.checked == 1
        assert ledger.passed

    def test_weights_read_only(self, small_hamiltonian, small_qpe):
        from witness_lab.qpe import q_weights

        Q = q_weights(small_hamiltonian, small_qpe)
        with pytest.raises(ValueError):
            Q.weights[0] = 2.0


class TestMargins:
    def test_almost_identity_margin(self, small_qpe):
        from witness_lab.qpe import almost_identity_margin

        # inner limits [6, 10] at L = 16
        assert list(almost_identity_margin([0.5, 0.375, 0.4375, 0.2], small_qpe)) == [2, 0, 1, -3]

    def test_almost_zero_margin(self, small_qpe):
        from witness_lab.qpe import almost_zero_margin

        d = almost_zero_margin([0.125, 0.5, 0.75], small_qpe)
        assert d == pytest.approx([4.0, 0.0, 2.0])

    @pytest.mark.parametrize("seed", SEEDS)
    def test_lemmas_hold_on_random_spectra(self, seed, ledger):
        from witness_lab.qpe import q_lemma_violations

        lam = np.random.default_rng(seed).uniform(0, 1, 64)
        for L in (64, 256):
            q_lemma_violations(lam, make_qpe(L, make_window(0.5, 0.25)), ledger, seed=seed)
        assert ledger.checked > 0
        assert ledger.passed, ledger.violations


class TestQmass:
    def test_small_instance(self, small_hamiltonian, small_window, small_qpe):
        from witness_lab.qpe import qmass_check

        measured, bound = qmass_check(small_hamiltonian, small_window, small_qpe)
        assert bound == pytest.approx(0.5)
        assert measured <= bound

    def test_all_inside_window_is_zero(self):
        from witness_lab.qpe import qmass_check

        H = make_hamiltonian([0.45, 0.5, 0.55])
        measured, _ = qmass_check(H, make_window(), make_qpe())
        assert measured == pytest.approx(0.0, abs=TOL["exact"])


class TestPhaseEstimation:
    """U_QPE is unitary, Pi_SP a projector, and Pi_P Pi_SP Pi_P = Q(H) (x) Pi_P."""

    def test_unitary(self):
        from witness_lab.qpe import build_u_qpe

        U = build_u_qpe(make_hamiltonian(basis="random", seed=1), 8)
        assert np.max(np.abs(U @ U.conj().T - np.eye(64))) < TOL["operator"]

    def test_projector(self):
        from witness_lab.qpe import build_pi_sp

        H = make_hamiltonian(basis="random", seed=2)
        P = build_pi_sp(H, make_qpe())
        assert np.max(np.abs(P @ P - P)) < TOL["operator"]
        assert np.max(np.abs(P - P.conj().T)) < TOL["exact"]

    @pytest.mark.parametrize("seed", SEEDS[:3])
    def test_compression_identity(self, seed):
        from witness_lab.qpe import qpe_identity_residual

        H = make_hamiltonian(basis="random", seed=seed)
        assert qpe_identity_residual(H, make_qpe()) <= TOL["qpe_identity"]

    def test_uniform_state(self):
        from witness_lab.qpe import pi_p, uniform_state

        mu = uniform_state(SMALL["L"])
        assert np.vdot(mu, mu).real == pytest.approx(1.0)
        P = pi_p(SMALL["L"])
        assert np.trace(P).real == pytest.approx(1.0)


class TestOnGridSpectrum:
    def test_points_on_inner_grid(self):
        from witness_lab.qpe import on_grid_spectrum

        qc = make_qpe(1024, make_window(0.5, 0.25))
        lam = on_grid_spectrum(qc, 16)
        assert len(np.unique(lam)) == 16
        assert np.all(lam >= qc.inner_lower) and np.all(lam <= qc.inner_upper)
        assert all(qc.grid.contains(x) for x in lam)

    def test_band_is_clipped(self):
        from witness_lab.qpe import on_grid_spectrum

        qc = make_qpe(1024, make_window(0.5, 0.25))
        lam = on_grid_spectrum(qc, 8, span=0.05)
        assert np.max(np.abs(lam - 0.5)) <= 0.025 + 1e-12

    def test_too_many_points(self):
        from witness_lab.qpe import on_grid_spectrum
        from witness_lab.types import ContractViolation

        with pytest.raises(ContractViolation, match="distinct"):
            on_grid_spectrum(make_qpe(), 9)


class TestUnitInterval:
    def test_spectrum_mapped_into_padding(self):
        from witness_lab.hamiltonian import random_local
        from witness_lab.qpe import to_unit_interval

        H, _, amap = to_unit_interval(random_local(3, 5, seed=0), padding=0.1)
        assert H.eigenvalues[0] == pytest.approx(0.1)
        assert H.eigenvalues[-1] == pytest.approx(0.9)
        assert amap.invert(amap.apply(0.37)) == pytest.approx(0.37)

    def test_window_centre_snaps_to_grid(self):
        from witness_lab.hamiltonian import random_local
        from witness_lab.qpe import to_unit_interval

        H = random_local(3, 5, seed=1)
        centre = float(np.median(H.eigenvalues))
        _, window, _ = to_unit_interval(H, make_window(centre, 1.0), padding=0.1, L=64)
        assert round(window.e0 * 64) == pytest.approx(window.e0 * 64, abs=1e-9)

    def test_bad_padding(self):
        from witness_lab.qpe import to_unit_interval
        from witness_lab.types import ContractViolation

        with pytest.raises(ContractViolation, match="padding"):
            to_unit_interval(make_hamiltonian(), padding=0.5)
