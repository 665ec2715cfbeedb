"""Cost values, chain-rule derivatives and the evaluation diagnostics."""

import numpy as np
import pytest

from ipgopt import (CircuitTemplate, FrobeniusInfidelity, MatrixDistance,
                    StateInfidelity, basis_state, circuit_unitary, delta_theta,
                    fd_gradient, fd_hessian, fidelity_histogram, gate_list,
                    ghz_state, qft_unitary, random_init, rz)

S2 = np.sqrt(2.0)


class TestStateInfidelity:
    def test_ghz_at_zero_params(self):
        cost = StateInfidelity(CircuitTemplate(5, 3), ghz_state(5, -1))
        value = cost.value(np.zeros(45))
        assert abs(value - (1 - 1 / S2)) < 1e-14

    def test_zero_for_reachable_target(self):
        q = 3
        template = CircuitTemplate(q, 1)
        cost = StateInfidelity(template, basis_state(q, 0))
        assert cost.value(np.zeros(template.param_count)) == 0.0

    def test_single_qubit_closed_form(self):
        # F = cos((alpha-gamma)/2) * sin(beta/2) for target |1>
        template = CircuitTemplate(1, 1)
        cost = StateInfidelity(template, basis_state(1, 1))
        assert abs(cost.value(np.array([0.0, np.pi, 0.0]))) < 1e-15
        gamma, beta, alpha = 0.3, 1.1, -0.8
        expected = 1 - np.cos((alpha - gamma) / 2) * np.sin(beta / 2)
        assert abs(cost.value(np.array([gamma, beta, alpha])) - expected) < 1e-14

    def test_target_dimension_checked(self):
        with pytest.raises(ValueError):
            StateInfidelity(CircuitTemplate(3, 1), basis_state(2, 0))


class TestMatrixDistance:
    def test_zero_at_matching_circuit(self):
        template = CircuitTemplate(2, 2)
        params = random_init(template, 12)
        target = circuit_unitary(gate_list(template), params, 2)
        cost = MatrixDistance(template, target)
        assert cost.value(params) < 1e-28

    def test_opposite_identity(self):
        # B = RZ(2*pi) = -I against A = I: sum |2|^2 * 2 / 2 = 4
        template = CircuitTemplate(1, 1)
        cost = MatrixDistance(template, np.eye(2, dtype=complex))
        assert abs(cost.value(np.array([2 * np.pi, 0.0, 0.0])) - 4.0) < 1e-14

    def test_affine_identity(self):
        # D = 2 - 2*Re(sum conj(A)*B)/2**q for unitary pairs
        rng = np.random.default_rng(10)
        template = CircuitTemplate(3, 2)
        gates = gate_list(template)
        for target in (qft_unitary(3),
                       circuit_unitary(gates, random_init(template, 1), 3)):
            cost = MatrixDistance(template, target)
            for _ in range(5):
                params = rng.uniform(-np.pi, np.pi, template.param_count)
                b = circuit_unitary(gates, params, 3)
                z = np.sum(target.conj() * b) / 8
                assert abs(cost.value(params) - (2 - 2 * z.real)) < 1e-12


class TestFrobeniusInfidelity:
    def test_zero_at_matching_circuit(self):
        template = CircuitTemplate(2, 2)
        params = random_init(template, 13)
        target = circuit_unitary(gate_list(template), params, 2)
        cost = FrobeniusInfidelity(template, target)
        assert cost.value(params) < 1e-14

    def test_global_phase_on_target(self):
        template = CircuitTemplate(2, 2)
        params = random_init(template, 14)
        base = circuit_unitary(gate_list(template), params, 2)
        for phase in (0.0, 0.7, np.pi):
            cost = FrobeniusInfidelity(template, np.exp(1j * phase) * base)
            assert cost.value(params) < 1e-13

    def test_traceless_target(self):
        # circuit RZ(pi) = -i * PauliZ, so z = tr(-iZ)/2 = 0
        template = CircuitTemplate(1, 1)
        cost = FrobeniusInfidelity(template, np.eye(2, dtype=complex))
        assert abs(cost.value(np.array([np.pi, 0.0, 0.0])) - 1.0) < 1e-14


class TestPhaseSensitivity:
    """Only the Frobenius cost ignores a global sign flip."""

    def make_costs(self, flip):
        template = CircuitTemplate(2, 1)
        sign = -1.0 if flip else 1.0
        unitary_target = sign * qft_unitary(2)
        state_target = sign * ghz_state(2, -1)
        return (StateInfidelity(template, state_target),
                MatrixDistance(template, unitary_target),
                FrobeniusInfidelity(template, unitary_target))

    def test_frobenius_invariant_others_not(self):
        params = random_init(CircuitTemplate(2, 1), 15)
        state_a, dist_a, frob_a = self.make_costs(flip=False)
        state_b, dist_b, frob_b = self.make_costs(flip=True)
        assert abs(frob_a.value(params) - frob_b.value(params)) < 1e-14
        assert abs(state_a.value(params) - state_b.value(params)) > 1e-3
        assert abs(dist_a.value(params) - dist_b.value(params)) > 1e-3

    def test_frobenius_invariant_under_circuit_phase_layer(self):
        # appending RZ(2*pi) multiplies the circuit matrix by -1
        template = CircuitTemplate(2, 1)
        params = random_init(template, 16)
        gates = gate_list(template)
        target = qft_unitary(2)
        plain = circuit_unitary(gates, params, 2)
        flipped = circuit_unitary(gates + [rz(0, angle=2 * np.pi)], params, 2)
        np.testing.assert_allclose(flipped, -plain, atol=1e-14)
        z_plain = abs(np.sum(target.conj() * plain) / 4) ** 2
        z_flip = abs(np.sum(target.conj() * flipped) / 4) ** 2
        assert abs(z_plain - z_flip) < 1e-14


class TestDerivatives:
    def test_single_ry_closed_forms(self):
        # d(1-F)/dbeta = -cos(beta/2)/2, d2 = sin(beta/2)/4 at gamma=alpha=0
        template = CircuitTemplate(1, 1)
        cost = StateInfidelity(template, basis_state(1, 1))
        params = np.array([0.0, np.pi / 2, 0.0])
        grad, hess = cost.gradient_and_hessian(params)
        assert abs(grad[1] - (-S2 / 4)) < 1e-15
        assert abs(hess[1, 1] - S2 / 8) < 1e-15

    @pytest.mark.parametrize("make", [
        lambda t: StateInfidelity(t, ghz_state(3, -1)),
        lambda t: MatrixDistance(t, qft_unitary(3)),
        lambda t: FrobeniusInfidelity(t, qft_unitary(3)),
    ], ids=["state", "distance", "frobenius"])
    def test_gradient_and_hessian_vs_fd(self, make):
        template = CircuitTemplate(3, 2)
        cost = make(template)
        rng = np.random.default_rng(20)
        for _ in range(3):
            params = rng.uniform(-np.pi, np.pi, template.param_count)
            grad = cost.gradient(params)
            grad2, hess = cost.gradient_and_hessian(params)
            np.testing.assert_array_equal(grad, grad2)
            fd_g = fd_gradient(cost.value, params)
            fd_h = fd_hessian(cost.value, params)
            assert np.abs(grad - fd_g).max() / max(np.abs(fd_g).max(), 1e-12) < 1e-6
            assert np.abs(hess - fd_h).max() / max(np.abs(fd_h).max(), 1e-12) < 1e-5
            assert np.array_equal(hess, hess.T)

    def test_values_never_meaningfully_negative(self):
        rng = np.random.default_rng(21)
        template = CircuitTemplate(2, 2)
        costs = [StateInfidelity(template, ghz_state(2, -1)),
                 MatrixDistance(template, qft_unitary(2)),
                 FrobeniusInfidelity(template, qft_unitary(2))]
        for _ in range(20):
            params = rng.uniform(-np.pi, np.pi, template.param_count)
            for cost in costs:
                assert cost.value(params) >= -1e-12


class TestDeltaTheta:
    def test_identical_states(self):
        assert delta_theta(basis_state(2, 1), basis_state(2, 1)) == 0.0
        # arccos near 1 amplifies the 1e-16 norm roundoff of 1/sqrt(2)
        # amplitudes to the 1e-8 scale
        psi = ghz_state(3, -1)
        assert abs(delta_theta(psi, psi)) < 1e-7

    def test_quadrature_phase(self):
        psi = basis_state(3, 5)
        assert delta_theta(psi, 1j * psi) == 0.0
        psi = ghz_state(3, -1)
        assert abs(delta_theta(psi, 1j * psi)) < 1e-7

    def test_orthogonal_states(self):
        assert abs(delta_theta(basis_state(1, 0), basis_state(1, 1)) - np.pi / 2) < 1e-15

    def test_roundoff_clamped(self):
        psi = basis_state(1, 0) * (1 + 5e-16)
        delta_theta(psi, psi)  # must not raise on |overlap| slightly above 1


class TestFidelityHistogram:
    def test_exact_circuit(self):
        template = CircuitTemplate(2, 2)
        params = random_init(template, 30)
        gates = gate_list(template)
        target = circuit_unitary(gates, params, 2)
        fids = fidelity_histogram(gates, params, target, 64, seed=5)
        np.testing.assert_allclose(fids, np.ones(64), atol=1e-12)

    def test_global_phase_ignored(self):
        template = CircuitTemplate(2, 2)
        params = random_init(template, 31)
        gates = gate_list(template)
        target = np.exp(0.9j) * circuit_unitary(gates, params, 2)
        fids = fidelity_histogram(gates, params, target, 64, seed=5)
        np.testing.assert_allclose(fids, np.ones(64), atol=1e-12)

    def test_deterministic(self):
        template = CircuitTemplate(2, 1)
        params = random_init(template, 32)
        gates = gate_list(template)
        a = fidelity_histogram(gates, params, qft_unitary(2), 100, seed=9)
        b = fidelity_histogram(gates, params, qft_unitary(2), 100, seed=9)
        np.testing.assert_array_equal(a, b)

    def test_delta_theta_channel(self):
        template = CircuitTemplate(2, 1)
        params = random_init(template, 33)
        gates = gate_list(template)
        fids, gaps = fidelity_histogram(gates, params, qft_unitary(2), 50,
                                        seed=2, with_delta_theta=True)
        assert fids.shape == gaps.shape == (50,)
        assert np.all(gaps >= 0)

    def test_sample_count_checked(self):
        with pytest.raises(ValueError):
            fidelity_histogram([], None, qft_unitary(1), 0, seed=0)
