"""Dense statevector and unitary arithmetic for small qubit registers.

Conventions used throughout the package:

* Basis index ``k`` of a ``q``-qubit register is read as a binary string
  with qubit 0 as the most significant bit, so for q=5 index 0 is |00000>
  and index 31 is |11111>.
* Rotations follow R(theta) = exp(-i*theta*P/2) with P in {Y, Z}:
  RZ(theta) = diag(exp(-i*theta/2), exp(+i*theta/2)) and RY(theta) is the
  real rotation by theta/2.  The sign convention is observable because the
  state-overlap cost keeps the phase (real part, not modulus), so it is
  fixed here and verified by tests.
* States are complex128 arrays of length 2**q; unitaries are dense
  (2**q, 2**q) arrays whose column j equals the circuit applied to basis
  state j.  Dense simulation is intended for q up to roughly 12.

All gate kernels accept an arbitrary batch of operands: the state axis is
the *last* axis and every leading axis is broadcast over.  The derivative
engine relies on this to propagate many insertion branches in one pass.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

ROTATION_KINDS = ("rz", "ry")
GATE_KINDS = ROTATION_KINDS + ("cx",)


@dataclass(frozen=True)
class GateSpec:
    """One circuit element: an rz/ry rotation or a cx (controlled NOT).

    Rotations carry their angle either directly (``angle``, radians) or as
    an index into a parameter vector (``param``); exactly one of the two
    must be set.
    """

    kind: str
    qubit: int
    control: int | None = None
    angle: float | None = None
    param: int | None = None

    def __post_init__(self):
        if self.kind in ROTATION_KINDS:
            if (self.angle is None) == (self.param is None):
                raise ValueError(
                    f"{self.kind} gate needs exactly one of angle= or param=")
            if self.control is not None:
                raise ValueError("rotation gates take no control qubit")
        elif self.kind == "cx":
            if self.control is None:
                raise ValueError("cx gate needs a control qubit")
            if self.control == self.qubit:
                raise ValueError("cx control and target must differ")
            if self.angle is not None or self.param is not None:
                raise ValueError("cx gate takes no angle")
        else:
            raise ValueError(f"unknown gate kind {self.kind!r}")


def rz(qubit: int, angle: float | None = None, param: int | None = None) -> GateSpec:
    return GateSpec("rz", qubit, angle=angle, param=param)


def ry(qubit: int, angle: float | None = None, param: int | None = None) -> GateSpec:
    return GateSpec("ry", qubit, angle=angle, param=param)


def cx(control: int, target: int) -> GateSpec:
    return GateSpec("cx", target, control=control)


def gate_angle(gate: GateSpec, params=None) -> float:
    """Resolve a rotation gate's angle against a parameter vector."""
    if gate.param is None:
        return float(gate.angle)
    if params is None or gate.param >= len(params):
        have = 0 if params is None else len(params)
        raise ValueError(
            f"gate references parameter {gate.param} but {have} value(s) were given")
    return float(params[gate.param])


def rz_matrix(theta: float) -> np.ndarray:
    return np.array([[np.exp(-0.5j * theta), 0.0],
                     [0.0, np.exp(+0.5j * theta)]])


def ry_matrix(theta: float) -> np.ndarray:
    c, s = np.cos(0.5 * theta), np.sin(0.5 * theta)
    return np.array([[c, -s], [s, c]], dtype=complex)


def num_qubits(dim: int) -> int:
    q = dim.bit_length() - 1
    if dim <= 0 or (1 << q) != dim:
        raise ValueError(f"state length {dim} is not a power of two")
    return q


def apply_matrix(arr: np.ndarray, q: int, qubit: int, mat: np.ndarray) -> np.ndarray:
    """Apply a 2x2 matrix to one qubit of a batched operand (state axis last)."""
    if not 0 <= qubit < q:
        raise ValueError(f"qubit index {qubit} out of range for {q} qubits")
    lead = arr.shape[:-1]
    left = 1 << qubit
    right = 1 << (q - qubit - 1)
    a = arr.reshape(lead + (left, 2, right))
    out = np.einsum("st,...ltr->...lsr", mat, a)
    return out.reshape(lead + (1 << q,))


@lru_cache(maxsize=None)
def _cnot_source(q: int, control: int, target: int) -> np.ndarray:
    # source[k] = index whose amplitude lands at k; the map is an involution
    idx = np.arange(1 << q)
    cmask = 1 << (q - 1 - control)
    tmask = 1 << (q - 1 - target)
    src = np.where(idx & cmask, idx ^ tmask, idx)
    src.flags.writeable = False
    return src


def apply_cnot_batch(arr: np.ndarray, q: int, control: int, target: int) -> np.ndarray:
    if control == target:
        raise ValueError("cx control and target must differ")
    for idx in (control, target):
        if not 0 <= idx < q:
            raise ValueError(f"qubit index {idx} out of range for {q} qubits")
    return arr[..., _cnot_source(q, control, target)]


def apply_gate(arr: np.ndarray, q: int, gate: GateSpec, params=None) -> np.ndarray:
    if gate.kind == "cx":
        return apply_cnot_batch(arr, q, gate.control, gate.qubit)
    theta = gate_angle(gate, params)
    mat = rz_matrix(theta) if gate.kind == "rz" else ry_matrix(theta)
    return apply_matrix(arr, q, gate.qubit, mat)


# -- states ------------------------------------------------------------


def basis_state(q: int, k: int) -> np.ndarray:
    """Computational basis state |k> of a q-qubit register."""
    if q < 1:
        raise ValueError("need at least one qubit")
    if not 0 <= k < (1 << q):
        raise ValueError(f"basis index {k} out of range for {q} qubits")
    state = np.zeros(1 << q, dtype=complex)
    state[k] = 1.0
    return state


def apply_rz(state: np.ndarray, qubit: int, theta: float) -> np.ndarray:
    state = np.asarray(state, dtype=complex)
    return apply_matrix(state, num_qubits(state.shape[-1]), qubit, rz_matrix(theta))


def apply_ry(state: np.ndarray, qubit: int, theta: float) -> np.ndarray:
    state = np.asarray(state, dtype=complex)
    return apply_matrix(state, num_qubits(state.shape[-1]), qubit, ry_matrix(theta))


def apply_cnot(state: np.ndarray, control: int, target: int) -> np.ndarray:
    state = np.asarray(state, dtype=complex)
    return apply_cnot_batch(state, num_qubits(state.shape[-1]), control, target)


def apply_circuit(state: np.ndarray, gates, params=None) -> np.ndarray:
    """Run a gate sequence on a state (or batch of states, state axis last)."""
    arr = np.asarray(state, dtype=complex)
    q = num_qubits(arr.shape[-1])
    for gate in gates:
        arr = apply_gate(arr, q, gate, params)
    return arr


# -- unitaries ---------------------------------------------------------


def circuit_unitary(gates, params, q: int) -> np.ndarray:
    """Dense matrix of a gate sequence; column j is the circuit on |j>."""
    work = np.eye(1 << q, dtype=complex)  # row i = basis state i, state axis last
    for gate in gates:
        work = apply_gate(work, q, gate, params)
    return work.T.copy()


def qft_unitary(q: int) -> np.ndarray:
    """Fourier matrix with entries omega**(j*k) / 2**(q/2), omega = exp(2*pi*i/2**q)."""
    if q < 1:
        raise ValueError("need at least one qubit")
    dim = 1 << q
    k = np.arange(dim)
    phases = np.outer(k, k) % dim  # keep angles in [0, 2*pi) for full precision
    return np.exp(2j * np.pi * phases / dim) / np.sqrt(dim)


# -- reference states --------------------------------------------------


def ghz_state(q: int, sign: int = -1) -> np.ndarray:
    """(|0...0> + sign*|1...1>)/sqrt(2)."""
    if q < 2:
        raise ValueError("GHZ state needs at least two qubits")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    state = np.zeros(1 << q, dtype=complex)
    state[0] = 1.0 / np.sqrt(2.0)
    state[-1] = sign / np.sqrt(2.0)
    return state


def w_state(q: int) -> np.ndarray:
    """Equal superposition of all one-hot basis strings, 1/sqrt(q) each."""
    if q < 2:
        raise ValueError("W state needs at least two qubits")
    state = np.zeros(1 << q, dtype=complex)
    for j in range(q):
        state[1 << j] = 1.0 / np.sqrt(q)
    return state


def inner_product(a: np.ndarray, b: np.ndarray) -> complex:
    """<a|b> = sum_k conj(a_k) * b_k."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))
