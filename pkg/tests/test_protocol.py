"""Tests for the energy subspace test: circuit route, operator route, O_succ, M and the witness.

Test data loaded from: data/fixtures/scenarios/perron.json
"""

from __future__ import annotations

import numpy as np
import pytest

from conftest import (
    SMALL,
    TOL,
    circuit_setup,
    load_scenarios,
    make_explicit_params,
    make_hamiltonian,
    make_params,
    make_qpe,
    make_window,
    random_input,
)

_data = load_scenarios("perron")


def _spec(id_: str):
    return next(s for s in _data["eigenpairs"] if s["id"] == id_)


class TestProtocolConfig:
    @pytest.mark.parametrize("eps", [-0.1, 0.51])
    def test_epsilon_range(self, eps):
        from witness_lab.protocol import ProtocolConfig
        from witness_lab.types import ContractViolation

        with pytest.raises(ContractViolation, match="epsilon"):
            ProtocolConfig(eps, "circuit", make_qpe(), 2)

    def test_boundary_epsilon_allowed(self):
        from witness_lab.protocol import ProtocolConfig

        assert ProtocolConfig(0.5, "direct", make_qpe(), 1).t_dim == 2

    def test_unknown_mode(self):
        from witness_lab.protocol import ProtocolConfig
        from witness_lab.types import ContractViolation

        with pytest.raises(ContractViolation, match="mode"):
            ProtocolConfig(0.1, "hybrid", make_qpe(), 1)


class TestCircuitRoute:
    """run_algorithm1() simulates the test on S1, S2, P1, P2 and T."""

    @pytest.mark.parametrize("eps", [0.0, 0.05, 0.2])
    def test_matches_operator_route(self, eps):
        from witness_lab.protocol import acceptance_operator_route, run_algorithm1

        H, _, obs, config = circuit_setup(eps)
        psi = random_input(H.dim, 3)
        run = run_algorithm1(psi, H, obs, config)
        p_op = acceptance_operator_route(psi, H, obs, config)
        assert abs(run.p_circuit - p_op) <= TOL["two_route"]
        assert 0.0 <= run.p_circuit <= 1.0

    def test_first_round_norm(self):
        from witness_lab.protocol import run_algorithm1
        from witness_lab.qpe import q_weights

        H, _, obs, config = circuit_setup(0.1)
        psi = random_input(H.dim, 5)
        Q = q_weights(H, config.qpe).matrix
        projected = np.kron(Q, Q) @ psi.amplitudes
        run = run_algorithm1(psi, H, obs, config)
        assert run.first_round_norm == pytest.approx(np.vdot(projected, projected).real, abs=TOL["operator"])

    @pytest.mark.parametrize("eps", [0.0, 0.1, 0.3])
    def test_acceptance_below_first_round_norm(self, eps):
        """Post-selection only removes norm, so p_circuit never exceeds the first-round norm."""
        from witness_lab.protocol import run_algorithm1

        H, _, obs, config = circuit_setup(eps)
        for seed in range(3):
            run = run_algorithm1(random_input(H.dim, seed), H, obs, config)
            assert run.p_circuit <= run.first_round_norm + TOL["operator"]

    def test_rejects_direct_observables(self):
        from witness_lab.ensemble import build_observables
        from witness_lab.protocol import ProtocolConfig, run_algorithm1
        from witness_lab.types import ContractViolation

        H = make_hamiltonian()
        obs = build_observables(make_params(5, 2), H, make_window(), "direct", seed=0)
        config = ProtocolConfig(0.1, "direct", make_qpe(), 2)
        with pytest.raises(ContractViolation, match="circuit-mode"):
            run_algorithm1(random_input(H.dim), H, obs, config)

    def test_resolution_cap(self):
        from witness_lab.protocol import ProtocolConfig, run_algorithm1
        from witness_lab.types import DimensionCapError

        H, window, obs, _ = circuit_setup(0.1)
        config = ProtocolConfig(0.1, "circuit", make_qpe(64, window), SMALL["m"])
        with pytest.raises(DimensionCapError):
            run_algorithm1(random_input(H.dim), H, obs, config)

    def test_unnormalised_input(self):
        from witness_lab.linalg import Statevector
        from witness_lab.protocol import run_algorithm1
        from witness_lab.types import ContractViolation

        H, _, obs, config = circuit_setup(0.1)
        half = Statevector((("S1", 8), ("S2", 8)), np.full(64, 1 / 16))
        with pytest.raises(ContractViolation, match="normalised"):
            run_algorithm1(half, H, obs, config)

    def test_wrong_layout(self):
        from witness_lab.linalg import Statevector
        from witness_lab.protocol import run_algorithm1
        from witness_lab.types import ContractViolation

        H, _, obs, config = circuit_setup(0.1)
        psi = Statevector.from_vector("S", np.eye(64)[0])
        with pytest.raises(ContractViolation, match="layout"):
            run_algorithm1(psi, H, obs, config)


class TestSecondOrder:
    def test_zero_epsilon_is_exact(self):
        from witness_lab.protocol import acceptance_operator_route, second_order_amplitude, taylor_residual

        H, _, obs, config = circuit_setup(0.0)
        psi = random_input(H.dim, 1)
        assert second_order_amplitude(psi, H, obs, config) == pytest.approx(
            acceptance_operator_route(psi, H, obs, config), abs=TOL["exact"]
        )
        assert taylor_residual(psi, H, obs, config) <= TOL["exact"]

    @pytest.mark.parametrize("eps", [0.05, 0.1, 0.2])
    def test_residual_is_small(self, eps):
        from witness_lab.protocol import taylor_residual

        H, _, obs, config = circuit_setup(eps)
        assert taylor_residual(random_input(H.dim, 2), H, obs, config) <= 20 * eps**3

    def test_operator_matches_amplitude(self):
        from witness_lab.protocol import build_second_order, second_order_amplitude

        H, _, obs, config = circuit_setup(0.1)
        psi = random_input(H.dim, 4)
        op = build_second_order(H, obs, config)
        V = H.eigenvectors
        # input in the product eigenbasis |a, b>
        coords = (V.conj().T @ psi.amplitudes.reshape(8, 8) @ V.conj()).reshape(-1)
        out = op @ coords
        assert np.vdot(out, out).real == pytest.approx(second_order_amplitude(psi, H, obs, config), abs=1e-10)

    def test_zero_epsilon_operator_is_q_squared(self):
        from witness_lab.protocol import build_second_order
        from witness_lab.qpe import q_weights

        H, _, obs, config = circuit_setup(0.0)
        q = q_weights(H, config.qpe).weights
        qq = np.kron(q, q)
        assert np.allclose(build_second_order(H, obs, config), np.diag(qq**2), atol=TOL["exact"])


class TestEffectiveOperator:
    def test_zero_epsilon_is_identity(self):
        from witness_lab.protocol import build_M

        assert np.allclose(build_M(make_params(3, 2, 0.5), 0.0), np.eye(9))

    def test_closed_form(self):
        from witness_lab.ensemble import expected_BB
        from witness_lab.protocol import build_M

        params = make_params(3, 2, 0.5, mu_mode="constant", mu=0.1)
        eps = 0.2
        expected = (1 - eps**2 + eps**2 * 0.01) * np.eye(9) + eps**2 * expected_BB(params)
        assert np.allclose(build_M(params, eps), expected)

    def test_build_O_succ_with_ensemble(self):
        from witness_lab.ensemble import build_observables
        from witness_lab.protocol import build_O_succ

        H, window = make_hamiltonian(), make_window()
        params = make_params(5, 4, 0.6)
        obs = build_observables(params, H, window, "direct", seed=1)
        op = build_O_succ(H, window, obs, 0.1, make_qpe(), params)
        assert op.O_succ.shape == (25, 25)
        assert np.max(np.abs(op.O_succ - op.O_succ.conj().T)) < TOL["exact"]
        assert op.M.shape == op.sandwiched.shape == (25, 25)
        assert op.q_window.shape == (5,)

    def test_build_O_succ_dimension_mismatch(self):
        from witness_lab.ensemble import build_observables
        from witness_lab.protocol import build_O_succ
        from witness_lab.types import ContractViolation

        H, window = make_hamiltonian(), make_window()
        obs = build_observables(make_params(5, 2), H, window, "direct", seed=1)
        with pytest.raises(ContractViolation, match="does not match"):
            build_O_succ(H, window, obs, 0.1, make_qpe(), make_params(4, 2))

    def test_build_O_succ_empty_window(self):
        from witness_lab.ensemble import build_observables
        from witness_lab.protocol import build_O_succ
        from witness_lab.types import ContractViolation

        H = make_hamiltonian([0.0, 0.05, 0.95])
        obs = build_observables(make_params(1, 1), None, None, "direct", seed=0)
        with pytest.raises(ContractViolation, match="no eigenvalues"):
            build_O_succ(H, make_window(), obs, 0.1, make_qpe())

    def test_sandwich_with_unit_weights(self):
        from witness_lab.protocol import build_M, sandwich

        M = build_M(make_params(3, 1, 0.5), 0.1)
        assert np.array_equal(sandwich(M, np.ones(3)), M)


class TestUniqueWitness:
    def test_two_by_two(self):
        from witness_lab.protocol import build_M, unique_witness

        spec = _spec("two_by_two")
        eps = 0.1
        params = make_explicit_params(spec["f_matrix"], spec["f"])
        result = unique_witness(build_M(params, eps))
        assert not result.degenerate
        assert result.lambda_top == pytest.approx(1 - eps**2 + eps**2 * spec["lambda"])
        assert result.gap == pytest.approx(eps**2 * (spec["lambda"] - spec["second"]))
        expected = np.array([1, 0, 0, 1]) / np.sqrt(2)
        assert np.allclose(result.state, expected, atol=TOL["witness"])

    def test_degenerate(self):
        from witness_lab.protocol import unique_witness

        result = unique_witness(np.eye(4))
        assert result.degenerate
        assert result.state is None

    def test_needs_ensemble(self):
        from witness_lab.ensemble import build_observables
        from witness_lab.protocol import build_O_succ, unique_witness
        from witness_lab.types import ContractViolation

        H, window = make_hamiltonian(), make_window()
        obs = build_observables(make_params(5, 2), H, window, "direct", seed=0)
        op = build_O_succ(H, window, obs, 0.1, make_qpe())
        with pytest.raises(ContractViolation, match="without an ensemble"):
            unique_witness(op)


class TestNoCase:
    """no_case_norm() bounds the success operator when the spectrum avoids the window."""

    _far = [0.0, 0.02, 0.05, 0.1, 0.9, 0.93, 0.96, 0.99]

    def _setup(self, epsilon: float = 0.1):
        from witness_lab.ensemble import build_observables, circuit_params
        from witness_lab.protocol import ProtocolConfig

        H = make_hamiltonian(self._far, basis="random", seed=0)
        window = make_window()
        obs = build_observables(circuit_params(2), H, window, "circuit", seed=0)
        return H, window, obs, ProtocolConfig(epsilon, "circuit", make_qpe(), 2)

    def test_norm_below_bound(self):
        from witness_lab.protocol import no_case_norm

        H, window, obs, config = self._setup()
        norm, bound = no_case_norm(H, window, config, obs, 4.0)
        assert bound == pytest.approx(0.25)
        assert norm <= bound

    def test_precondition(self):
        from witness_lab.protocol import no_case_norm
        from witness_lab.types import PreconditionError

        H, window, obs, config = self._setup()
        with pytest.raises(PreconditionError, match="from the inner window"):
            no_case_norm(H, window, config, obs, 8.0)

    def test_non_positive_c(self):
        from witness_lab.protocol import no_case_norm
        from witness_lab.types import ContractViolation

        H, window, obs, config = self._setup()
        with pytest.raises(ContractViolation):
            no_case_norm(H, window, config, obs, 0.0)


class TestEvaluate:
    def test_report(self):
        from witness_lab.protocol import evaluate

        H, window, obs, config = circuit_setup(0.1)
        report = evaluate(random_input(H.dim, 0), H, window, obs, config)
        assert abs(report.p_circuit - report.p_operator) <= TOL["two_route"]
        assert report.params["D"] == 5
        assert report.params["mode"] == "circuit"
        assert report.gap >= 0
        assert 0 <= report.overlap_top <= 1 + TOL["operator"]
        assert report.taylor_residual <= 20 * 0.1**3
        assert report.p_osucc_amplitude <= report.lambda_top * report.p_osucc + TOL["operator"]
        assert set(report.to_dict()) >= {"p_circuit", "p_operator", "p_osucc", "taylor_residual"}


class TestExpectedAcceptance:
    _q = np.array([0.9, 0.6, 1.0])

    def test_matches_sandwiched_quadratic_form(self):
        from witness_lab.protocol import build_M, expected_acceptance, sandwich

        params = make_params(3, 2, 0.5, f_mode="random", seed=1, mu_mode="constant", mu=0.2)
        psi = random_input(3, 4)
        v = psi.amplitudes
        S = sandwich(build_M(params, 0.2), self._q)
        assert expected_acceptance(psi, params, 0.2, self._q) == pytest.approx(
            np.vdot(v, S @ v).real, abs=TOL["exact"]
        )

    def test_witness_reaches_top_eigenvalue(self):
        from witness_lab.linalg import Statevector
        from witness_lab.protocol import build_M, expected_acceptance, sandwich, unique_witness

        params = make_params(3, 1, 0.5, f_mode="random", seed=2)
        result = unique_witness(sandwich(build_M(params, 0.1), self._q))
        witness = Statevector((("S1", 3), ("S2", 3)), result.state)
        accepted = expected_acceptance(witness, params, 0.1, self._q)
        assert accepted == pytest.approx(result.lambda_top, abs=TOL["witness"])

    def test_weight_count_must_match(self):
        from witness_lab.protocol import expected_acceptance
        from witness_lab.types import ContractViolation

        with pytest.raises(ContractViolation, match="window weights"):
            expected_acceptance(random_input(3, 0), make_params(3, 1), 0.1, np.ones(2))
