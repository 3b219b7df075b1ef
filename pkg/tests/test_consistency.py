"""Tests for cross-route consistency.

Checks that the statevector circuit, the exact operator route, the
second-order operator and the window-restricted success operator agree
with each other on the same instance.
"""

from __future__ import annotations

import numpy as np
import pytest

from conftest import SEEDS, TOL, circuit_setup, make_hamiltonian, make_qpe, random_input, unit

_EPSILONS = [0.0, 0.05, 0.1, 0.3]


class TestTwoRoutes:
    """run_algorithm1 == acceptance_operator_route for circuit-mode instances."""

    @pytest.mark.parametrize("epsilon", _EPSILONS)
    @pytest.mark.parametrize("seed", SEEDS)
    def test_probabilities_agree(self, seed, epsilon):
        from witness_lab.protocol import acceptance_operator_route, run_algorithm1

        H, _, observables, config = circuit_setup(epsilon, seed=seed)
        psi = random_input(H.dim, seed)

        circuit = run_algorithm1(psi, H, observables, config).p_circuit
        operator = acceptance_operator_route(psi, H, observables, config)
        assert circuit == pytest.approx(operator, abs=TOL["two_route"])

    @pytest.mark.parametrize("seed", SEEDS)
    def test_first_round_norm(self, seed):
        """Squared norm after one projection round is ||(Q (x) Q) psi||^2."""
        from witness_lab.protocol import run_algorithm1
        from witness_lab.qpe import q_weights

        H, _, observables, config = circuit_setup(0.1, seed=seed)
        psi = random_input(H.dim, seed)
        Q = q_weights(H, config.qpe).matrix
        projected = np.kron(Q, Q) @ psi.amplitudes

        run = run_algorithm1(psi, H, observables, config)
        assert run.first_round_norm == pytest.approx(np.vdot(projected, projected).real, abs=TOL["operator"])

    def test_zero_epsilon_is_first_round_twice(self):
        """With no rotation the acceptance is ||(Q^2 (x) Q^2) psi||^2."""
        from witness_lab.protocol import run_algorithm1
        from witness_lab.qpe import q_weights

        H, _, observables, config = circuit_setup(0.0, seed=3)
        psi = random_input(H.dim, 3)
        Q = q_weights(H, config.qpe).matrix
        out = np.kron(Q @ Q, Q @ Q) @ psi.amplitudes
        p = run_algorithm1(psi, H, observables, config).p_circuit
        assert p == pytest.approx(np.vdot(out, out).real, abs=TOL["two_route"])


class TestQpeCompression:
    @pytest.mark.parametrize("seed", SEEDS)
    def test_q_matrix_diagonal_in_eigenbasis(self, seed):
        from witness_lab.qpe import q_weights

        H = make_hamiltonian(basis="random", seed=seed)
        qw = q_weights(H, make_qpe())
        V = H.eigenvectors
        assert np.allclose(V.conj().T @ qw.matrix @ V, np.diag(qw.weights), atol=TOL["operator"])

    @pytest.mark.parametrize("seed", SEEDS[:2])
    def test_compression_matches_weights(self, seed):
        from witness_lab.qpe import qpe_identity_residual

        H = make_hamiltonian(basis="random", seed=seed)
        assert qpe_identity_residual(H, make_qpe()) <= TOL["qpe_identity"]


class TestSecondOrderOperator:
    @pytest.mark.parametrize("seed", SEEDS)
    def test_matrix_matches_amplitude(self, seed):
        """second_order_amplitude == ||K x||^2 with x the input in product eigenbasis coordinates."""
        from witness_lab.protocol import build_second_order, second_order_amplitude

        H, _, observables, config = circuit_setup(0.2, seed=seed)
        psi = random_input(H.dim, seed)
        V = H.eigenvectors
        X = psi.amplitudes.reshape(H.dim, H.dim)
        coords = (V.conj().T @ X @ V.conj()).reshape(-1)

        out = build_second_order(H, observables, config) @ coords
        expected = second_order_amplitude(psi, H, observables, config)
        assert np.vdot(out, out).real == pytest.approx(expected, abs=TOL["operator"])

    @pytest.mark.parametrize("seed", SEEDS)
    def test_window_block_is_success_operator(self, seed):
        """Restricting the full second-order operator to window pairs gives O_succ."""
        from witness_lab.hamiltonian import window_projector
        from witness_lab.protocol import build_O_succ, build_second_order

        eps = 0.15
        H, window, observables, config = circuit_setup(eps, seed=seed)
        members = window_projector(H, window).members
        N = H.dim
        idx = [a * N + b for a in members for b in members]

        full = build_second_order(H, observables, config)
        op = build_O_succ(H, window, observables, eps, config.qpe)
        assert np.allclose(full[np.ix_(idx, idx)], op.O_succ, atol=TOL["operator"])

    def test_taylor_residual_is_fourth_order(self):
        """Halving epsilon cuts the residual by far more than a factor of four."""
        from witness_lab.protocol import taylor_residual

        residuals = []
        psi = random_input(8, 5)
        for eps in (0.2, 0.1):
            H, _, observables, config = circuit_setup(eps, seed=5)
            residuals.append(taylor_residual(psi, H, observables, config))
        assert residuals[1] <= residuals[0] / 8 + TOL["operator"]


class TestVerifierForms:
    @pytest.mark.parametrize("seed", SEEDS)
    def test_instance_matches_closed_form(self, seed):
        from witness_lab.oracles import random_subspace, simple_verifier, simple_verifier_instance

        S = random_subspace(10, 3, seed)
        rng = np.random.default_rng(seed)
        psi = unit(rng.standard_normal(10) + 1j * rng.standard_normal(10))
        inst = simple_verifier_instance(S, psi)
        out = inst.pi_out @ inst.oracle.matrix @ inst.pi_in @ inst.witness

        assert np.vdot(out, out).real == pytest.approx(simple_verifier(S, psi), abs=TOL["operator"])
        assert simple_verifier(S, psi) == pytest.approx(np.linalg.norm(S.projector @ psi) ** 2)
