"""Exact first and second circuit derivatives by generator insertion.

A rotation R(theta) = exp(-i*theta*P/2) satisfies dR/dtheta = (-i*P/2) R,
so the derivative of a circuit output with respect to one angle equals the
same circuit with the constant matrix -i*P/2 inserted at that gate's
position.  Second derivatives insert at two positions; a repeated
insertion at the same gate collapses to -1/4 times the undifferentiated
circuit because P**2 = I.

Everything is evaluated in a single forward sweep: the current state and
all insertion branches live in one batch, and every gate is applied to the
whole batch at once.  A new first-order branch is spawned at each
parameterized gate, and second-order branches are spawned from the
first-order ones already in flight.  The batch holds 1 + P + P*(P+1)/2
rows for P parameterized gates, which bounds the work by the same number
of plain circuit evaluations.

Central finite differences are provided purely as test oracles; they are
never used in the optimization path.
"""

from dataclasses import dataclass

import numpy as np

from .sim import GateSpec, apply_gate, apply_matrix, num_qubits

# -i*P/2 for P = Z and P = Y
_GENERATORS = {
    "rz": np.array([[-0.5j, 0.0], [0.0, 0.5j]]),
    "ry": np.array([[0.0, -0.5], [0.5, 0.0]], dtype=complex),
}


@dataclass
class StateJet:
    """Circuit output with its parameter derivatives.

    value: (2**q,) output state.
    gradient: (n_params, 2**q), row k is d(psi)/d(theta_k).
    hessian: (n_params, n_params, 2**q) with hessian[j, k] identical to
        hessian[k, j] by construction, or None when only first order was
        requested.
    """

    value: np.ndarray
    gradient: np.ndarray
    hessian: np.ndarray | None = None


@dataclass
class UnitaryJet:
    """Circuit matrix with its parameter derivatives (same layout, one
    extra trailing axis for the input column)."""

    value: np.ndarray
    gradient: np.ndarray
    hessian: np.ndarray | None = None


def circuit_jet(gates, params, operand: np.ndarray, order: int = 2):
    """Value, gradient and (optionally) Hessian of a circuit applied to
    ``operand``.

    ``operand`` has the state axis first; anything after it is carried
    along, so a (2**q, 2**q) identity yields the circuit unitary and its
    derivatives.  Returns (value, gradient, hessian) with the parameter
    axes leading; hessian is None for order < 2.
    """
    if order not in (0, 1, 2):
        raise ValueError("order must be 0, 1 or 2")
    op = np.asarray(operand, dtype=complex)
    q = num_qubits(op.shape[0])
    params = np.asarray(params, dtype=float) if params is not None else None
    n_params = 0 if params is None else len(params)

    positions = [(i, g) for i, g in enumerate(gates) if g.param is not None]
    n_pos = len(positions)
    pair_base = 1 + n_pos
    rows = 1
    if order >= 1:
        rows += n_pos
    if order >= 2:
        rows += n_pos * (n_pos + 1) // 2

    # state axis last internally; leading axes: (row, *extra)
    extra = op.shape[1:]
    work = np.zeros((rows,) + extra + (op.shape[0],), dtype=complex)
    work[0] = np.moveaxis(op, 0, -1)

    def pair_row(i: int, j: int) -> int:  # i <= j, positions among parameterized gates
        return pair_base + j * (j + 1) // 2 + i

    pos_idx = 0
    for gate in gates:
        work = apply_gate(work, q, gate, params)
        if gate.param is None:
            continue
        gen = _GENERATORS[gate.kind]
        j = pos_idx
        if order >= 2:
            if j > 0:
                # mixed branches: later insertion on every earlier branch
                work[pair_row(0, j):pair_row(j, j)] = apply_matrix(
                    work[1:1 + j], q, gate.qubit, gen)
            # repeated insertion at the same gate: (-i*P/2)**2 = -I/4
            work[pair_row(j, j)] = -0.25 * work[0]
        if order >= 1:
            work[1 + j] = apply_matrix(work[0], q, gate.qubit, gen)
        pos_idx += 1

    def unpack(row):
        return np.moveaxis(row, -1, 0)

    value = unpack(work[0])
    if order == 0:
        return value, None, None

    gradient = np.zeros((n_params,) + op.shape, dtype=complex)
    for i, (_, gate) in enumerate(positions):
        gradient[gate.param] += unpack(work[1 + i])
    if order == 1:
        return value, gradient, None

    hessian = np.zeros((n_params, n_params) + op.shape, dtype=complex)
    for j in range(n_pos):
        pj = positions[j][1].param
        for i in range(j + 1):
            pi = positions[i][1].param
            term = unpack(work[pair_row(i, j)])
            if i == j:
                hessian[pi, pi] += term
            elif pi == pj:
                hessian[pi, pi] += 2.0 * term
            else:
                hessian[pi, pj] += term
                hessian[pj, pi] += term
    return value, gradient, hessian


def state_gradient(gates, params, input_state: np.ndarray) -> StateJet:
    """Output state and its exact gradient."""
    value, gradient, _ = circuit_jet(gates, params, input_state, order=1)
    return StateJet(value, gradient)


def state_hessian(gates, params, input_state: np.ndarray) -> StateJet:
    """Output state with exact gradient and Hessian."""
    value, gradient, hessian = circuit_jet(gates, params, input_state, order=2)
    return StateJet(value, gradient, hessian)


def unitary_gradient(gates, params, q: int, order: int = 2) -> UnitaryJet:
    """Circuit matrix and its derivatives; column j of gradient[k] equals
    the state gradient for input |j>."""
    value, gradient, hessian = circuit_jet(
        gates, params, np.eye(1 << q, dtype=complex), order=order)
    return UnitaryJet(value, gradient, hessian)


# -- finite-difference oracles (tests only) ------------------------------


def fd_gradient(f, x: np.ndarray, h: float = 1e-5) -> np.ndarray:
    """Central-difference gradient of a scalar or vector valued function."""
    if h <= 0:
        raise ValueError("step size must be positive")
    x = np.asarray(x, dtype=float)
    out = None
    for k in range(len(x)):
        step = np.zeros_like(x)
        step[k] = h
        diff = (np.asarray(f(x + step)) - np.asarray(f(x - step))) / (2.0 * h)
        if out is None:
            out = np.zeros((len(x),) + diff.shape, dtype=np.asarray(diff).dtype)
        out[k] = diff
    return out


def fd_hessian(f, x: np.ndarray, h: float = 1e-4) -> np.ndarray:
    """Central-difference Hessian of a scalar or vector valued function."""
    if h <= 0:
        raise ValueError("step size must be positive")
    x = np.asarray(x, dtype=float)
    n = len(x)
    f0 = np.asarray(f(x))
    out = np.zeros((n, n) + f0.shape, dtype=f0.dtype)

    def at(*pairs):
        xs = x.copy()
        for k, sgn in pairs:
            xs[k] += sgn * h
        return np.asarray(f(xs))

    for k in range(n):
        out[k, k] = (at((k, +1)) - 2.0 * f0 + at((k, -1))) / h**2
    for j in range(n):
        for k in range(j + 1, n):
            mixed = (at((j, +1), (k, +1)) - at((j, +1), (k, -1))
                     - at((j, -1), (k, +1)) + at((j, -1), (k, -1))) / (4.0 * h**2)
            out[j, k] = mixed
            out[k, j] = mixed
    return out
