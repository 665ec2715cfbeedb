"""Cost functions for state preparation and full-unitary compilation.

Three costs share one interface (value / gradient / hessian over a flat
angle vector):

* StateInfidelity: 1 - Re<target|psi>, phase sensitive on purpose.
* MatrixDistance: mean element-wise squared deviation
  sum |A - B|**2 / 2**q between target A and circuit matrix B.  Because
  both matrices stay unitary this equals 2 - 2*Re(z) with
  z = sum conj(A)*B / 2**q, which is what the derivatives use.
* FrobeniusInfidelity: 1 - |z|**2, invariant under a global phase on
  either matrix.

Gradients and Hessians come from the exact circuit jets; the Hessian is
exactly symmetric by construction.
"""

import numpy as np

from .ansatz import CircuitTemplate, gate_list
from .deriv import circuit_jet
from .sim import apply_circuit, basis_state, circuit_unitary, inner_product


class CostFunction:
    """Base: binds a circuit template and exposes value/gradient/hessian."""

    def __init__(self, template: CircuitTemplate):
        self.template = template
        self.gates = gate_list(template)
        self.dim = 1 << template.num_qubits

    def value(self, params) -> float:
        raise NotImplementedError

    def gradient(self, params) -> np.ndarray:
        raise NotImplementedError

    def hessian(self, params) -> np.ndarray:
        return self.gradient_and_hessian(params)[1]

    def gradient_and_hessian(self, params):
        raise NotImplementedError

    def _check_target(self, target: np.ndarray, expected_shape):
        if target.shape != expected_shape:
            raise ValueError(
                f"target shape {target.shape} does not match template "
                f"({self.template.num_qubits} qubits)")


class StateInfidelity(CostFunction):
    """1 - Re<target|psi(params)> for a fixed input state (default |0...0>)."""

    def __init__(self, template, target, input_state=None):
        super().__init__(template)
        self.target = np.asarray(target, dtype=complex)
        self._check_target(self.target, (self.dim,))
        if input_state is None:
            input_state = basis_state(template.num_qubits, 0)
        self.input_state = np.asarray(input_state, dtype=complex)
        self._check_target(self.input_state, (self.dim,))

    def value(self, params) -> float:
        psi = apply_circuit(self.input_state, self.gates, params)
        return 1.0 - np.vdot(self.target, psi).real

    def gradient(self, params) -> np.ndarray:
        _, dpsi, _ = circuit_jet(self.gates, params, self.input_state, order=1)
        return -np.einsum("c,kc->k", self.target.conj(), dpsi).real

    def gradient_and_hessian(self, params):
        _, dpsi, d2psi = circuit_jet(self.gates, params, self.input_state, order=2)
        grad = -np.einsum("c,kc->k", self.target.conj(), dpsi).real
        hess = -np.einsum("c,jkc->jk", self.target.conj(), d2psi).real
        return grad, hess


class _UnitaryCost(CostFunction):
    """Shared machinery for costs of the circuit matrix B against target A."""

    def __init__(self, template, target):
        super().__init__(template)
        self.target = np.asarray(target, dtype=complex)
        self._check_target(self.target, (self.dim, self.dim))

    def _overlap(self, params) -> complex:
        unitary = circuit_unitary(self.gates, params, self.template.num_qubits)
        return np.sum(self.target.conj() * unitary) / self.dim

    def _overlap_jet(self, params, order):
        eye = np.eye(self.dim, dtype=complex)
        value, grad, hess = circuit_jet(self.gates, params, eye, order=order)
        a_conj = self.target.conj()
        z = np.sum(a_conj * value) / self.dim
        dz = np.einsum("mn,kmn->k", a_conj, grad) / self.dim
        d2z = None
        if order >= 2:
            d2z = np.einsum("mn,jkmn->jk", a_conj, hess) / self.dim
        return z, dz, d2z


class MatrixDistance(_UnitaryCost):
    """sum |A - B(params)|**2 / 2**q."""

    def value(self, params) -> float:
        unitary = circuit_unitary(self.gates, params, self.template.num_qubits)
        return float(np.sum(np.abs(self.target - unitary) ** 2) / self.dim)

    def gradient(self, params) -> np.ndarray:
        _, dz, _ = self._overlap_jet(params, order=1)
        return -2.0 * dz.real

    def gradient_and_hessian(self, params):
        _, dz, d2z = self._overlap_jet(params, order=2)
        return -2.0 * dz.real, -2.0 * d2z.real


class FrobeniusInfidelity(_UnitaryCost):
    """1 - |sum conj(A)*B / 2**q|**2; global-phase invariant."""

    def value(self, params) -> float:
        return 1.0 - abs(self._overlap(params)) ** 2

    def gradient(self, params) -> np.ndarray:
        z, dz, _ = self._overlap_jet(params, order=1)
        return -2.0 * (np.conj(z) * dz).real

    def gradient_and_hessian(self, params):
        z, dz, d2z = self._overlap_jet(params, order=2)
        grad = -2.0 * (np.conj(z) * dz).real
        hess = -2.0 * (np.outer(dz.conj(), dz) + np.conj(z) * d2z).real
        return grad, hess


# -- evaluation diagnostics ----------------------------------------------


def delta_theta(reference: np.ndarray, candidate: np.ndarray) -> float:
    """|arccos(Re<ref|cand>) - arcsin(Im<ref|cand>)|.

    Zero for candidate = reference and for a +i global phase; the
    arccos/arcsin branches do not cancel every global phase (e.g. -1), so
    this is a convergence diagnostic, not a metric.
    """
    ip = inner_product(reference, candidate)
    re = float(np.clip(ip.real, -1.0, 1.0))
    im = float(np.clip(ip.imag, -1.0, 1.0))
    return abs(np.arccos(re) - np.arcsin(im))


def haar_random_states(dim: int, n_samples: int, seed: int) -> np.ndarray:
    """(n_samples, dim) array of normalized complex Gaussian rows."""
    rng = np.random.default_rng(seed)
    states = rng.standard_normal((n_samples, dim)) + 1j * rng.standard_normal((n_samples, dim))
    return states / np.linalg.norm(states, axis=1, keepdims=True)


def fidelity_histogram(gates, params, target: np.ndarray, n_samples: int,
                       seed: int, with_delta_theta: bool = False):
    """Per-sample |<target x | circuit x>| over random input states.

    Same seed gives the identical sample set.  With ``with_delta_theta``
    the arccos/arcsin angle gap is returned as a second array.
    """
    if n_samples < 1:
        raise ValueError("need at least one sample")
    target = np.asarray(target, dtype=complex)
    dim = target.shape[0]
    q = int(dim).bit_length() - 1
    circuit = circuit_unitary(gates, params, q)
    states = haar_random_states(dim, n_samples, seed)
    out_target = states @ target.T
    out_circuit = states @ circuit.T
    overlap = np.sum(out_target.conj() * out_circuit, axis=1)
    fidelities = np.abs(overlap)
    if not with_delta_theta:
        return fidelities
    gaps = np.abs(np.arccos(np.clip(overlap.real, -1.0, 1.0))
                  - np.arcsin(np.clip(overlap.imag, -1.0, 1.0)))
    return fidelities, gaps
