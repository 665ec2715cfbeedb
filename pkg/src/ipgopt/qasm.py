"""OpenQASM 2.0 export of optimized circuits, plus the matching parser.

The emitter writes one ``rz``/``ry``/``cx`` line per gate in circuit
order, with angles at 17 significant digits so the text round-trips the
double exactly.  ``rz``/``ry`` are read back under this package's
convention R(theta) = exp(-i*theta*P/2); a consumer that treats rz as a
pure phase gate differs only by an unobservable global phase.
"""

import re

import numpy as np

from .ansatz import CircuitTemplate, gate_list
from .sim import GateSpec, cx, gate_angle, ry, rz

_ROTATION_RE = re.compile(r"^(rz|ry)\(([^)]+)\)\s+q\[(\d+)\];$")
_CX_RE = re.compile(r"^cx\s+q\[(\d+)\]\s*,\s*q\[(\d+)\];$")
_QREG_RE = re.compile(r"^qreg\s+q\[(\d+)\];$")


def qasm_text(gates, params, q: int) -> str:
    lines = [
        "OPENQASM 2.0;",
        'include "qelib1.inc";',
        f"qreg q[{q}];",
        f"creg c[{q}];",
    ]
    for gate in gates:
        if gate.kind == "cx":
            lines.append(f"cx q[{gate.control}],q[{gate.qubit}];")
        else:
            angle = gate_angle(gate, params)
            lines.append(f"{gate.kind}({angle:.16e}) q[{gate.qubit}];")
    return "\n".join(lines) + "\n"


def export_qasm(template: CircuitTemplate, params, path) -> None:
    """Write the template circuit with bound angles as OpenQASM 2.0."""
    params = np.asarray(params, dtype=float)
    if len(params) != template.param_count:
        raise ValueError(
            f"expected {template.param_count} parameters, got {len(params)}")
    text = qasm_text(gate_list(template), params, template.num_qubits)
    with open(path, "w") as handle:
        handle.write(text)


def parse_qasm(text: str) -> tuple[int, list[GateSpec]]:
    """Read back a circuit written by ``qasm_text``.

    Returns (num_qubits, gates) with all angles bound.  Header lines and
    the classical register are checked and skipped; anything else is an
    error.
    """
    num_qubits = None
    gates: list[GateSpec] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("//"):
            continue
        if line.startswith("OPENQASM") or line.startswith("include") \
                or line.startswith("creg"):
            continue
        m = _QREG_RE.match(line)
        if m:
            num_qubits = int(m.group(1))
            continue
        m = _ROTATION_RE.match(line)
        if m:
            kind, angle, qubit = m.group(1), float(m.group(2)), int(m.group(3))
            ctor = rz if kind == "rz" else ry
            gates.append(ctor(qubit, angle=angle))
            continue
        m = _CX_RE.match(line)
        if m:
            gates.append(cx(int(m.group(1)), int(m.group(2))))
            continue
        raise ValueError(f"unsupported QASM line: {line!r}")
    if num_qubits is None:
        raise ValueError("missing qreg declaration")
    return num_qubits, gates
