"""Layered variational circuit template and its parameter bookkeeping.

Each layer gives every qubit the rotation triple RZ(gamma), RY(beta),
RZ(alpha) (gamma applied first), followed by a nearest-neighbour CNOT
chain with control i and target i+1 running down the register.  The chain
appears after every layer by default ("every"); the "between" pattern
omits it after the final layer.  Parameter count is 3 * qubits * layers.
"""

from dataclasses import dataclass

import numpy as np

from .sim import GateSpec, cx, ry, rz

SLOTS = ("gamma", "beta", "alpha")  # application order within a triple
ENTANGLER_PATTERNS = ("every", "between")


@dataclass(frozen=True)
class CircuitTemplate:
    num_qubits: int
    num_layers: int
    entangler: str = "every"

    def __post_init__(self):
        if self.num_qubits < 1:
            raise ValueError("need at least one qubit")
        if self.num_layers < 1:
            raise ValueError("need at least one layer")
        if self.entangler not in ENTANGLER_PATTERNS:
            raise ValueError(
                f"entangler must be one of {ENTANGLER_PATTERNS}, got {self.entangler!r}")

    @property
    def param_count(self) -> int:
        return 3 * self.num_qubits * self.num_layers

    @property
    def chain_count(self) -> int:
        """Number of CNOT chains the template emits."""
        if self.num_qubits == 1:
            return 0
        if self.entangler == "every":
            return self.num_layers
        return self.num_layers - 1

    def to_dict(self) -> dict:
        return {
            "num_qubits": self.num_qubits,
            "num_layers": self.num_layers,
            "entangler": self.entangler,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CircuitTemplate":
        return cls(data["num_qubits"], data["num_layers"],
                   data.get("entangler", "every"))


def param_index(template: CircuitTemplate, layer: int, qubit: int, slot: str) -> int:
    """Flat position of one angle: layer-major, then qubit, then slot."""
    if not 0 <= layer < template.num_layers:
        raise ValueError(f"layer {layer} out of range")
    if not 0 <= qubit < template.num_qubits:
        raise ValueError(f"qubit {qubit} out of range")
    if slot not in SLOTS:
        raise ValueError(f"slot must be one of {SLOTS}, got {slot!r}")
    return (layer * template.num_qubits + qubit) * 3 + SLOTS.index(slot)


def gate_list(template: CircuitTemplate) -> list[GateSpec]:
    """Expand the template into an ordered gate sequence."""
    q, layers = template.num_qubits, template.num_layers
    gates: list[GateSpec] = []
    for layer in range(layers):
        for qubit in range(q):
            base = param_index(template, layer, qubit, "gamma")
            gates.append(rz(qubit, param=base))
            gates.append(ry(qubit, param=base + 1))
            gates.append(rz(qubit, param=base + 2))
        if template.entangler == "every" or layer < layers - 1:
            for i in range(q - 1):
                gates.append(cx(i, i + 1))
    return gates


def random_init(template: CircuitTemplate, seed: int) -> np.ndarray:
    """Angles drawn i.i.d. from Uniform(-pi, pi) with NumPy's seeded PCG64."""
    rng = np.random.default_rng(seed)
    return rng.uniform(-np.pi, np.pi, template.param_count)
