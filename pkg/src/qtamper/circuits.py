"""Gate and circuit values for the statevector simulator.

Supported gate set: Hadamard, Rx, Ry, CNOT. Circuits are immutable
sequences of gates over a fixed qubit count; ``adjoint`` reverses the
gate order and negates rotation angles. Qubit 0 is the least significant
bit of the amplitude index.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import CircuitError

KIND_H = 0
KIND_RX = 1
KIND_RY = 2
KIND_CNOT = 3

_KIND_NAMES = {KIND_H: "h", KIND_RX: "rx", KIND_RY: "ry", KIND_CNOT: "cnot"}
_NAME_KINDS = {v: k for k, v in _KIND_NAMES.items()}


@dataclass(frozen=True)
class Gate:
    kind: int
    target: int
    control: int | None = None
    angle: float | None = None

    def __post_init__(self):
        if self.kind not in _KIND_NAMES:
            raise CircuitError(f"unknown gate kind {self.kind!r}")
        if self.target < 0:
            raise CircuitError(f"negative target qubit {self.target}")
        if self.kind == KIND_CNOT:
            if self.control is None:
                raise CircuitError("cnot gate needs a control qubit")
            if self.control == self.target:
                raise CircuitError("cnot control and target must differ")
        elif self.control is not None:
            raise CircuitError("only cnot gates take a control qubit")
        if self.kind in (KIND_RX, KIND_RY):
            if self.angle is None or not math.isfinite(self.angle):
                raise CircuitError(f"rotation angle must be finite, got {self.angle!r}")
        elif self.angle is not None:
            raise CircuitError("only rotation gates take an angle")

    @property
    def name(self) -> str:
        return _KIND_NAMES[self.kind]


def hadamard(target: int) -> Gate:
    return Gate(KIND_H, target)


def rot_x(angle: float, target: int) -> Gate:
    return Gate(KIND_RX, target, angle=float(angle))


def rot_y(angle: float, target: int) -> Gate:
    return Gate(KIND_RY, target, angle=float(angle))


def cnot(control: int, target: int) -> Gate:
    return Gate(KIND_CNOT, target, control=control)


@dataclass(frozen=True)
class QuantumCircuit:
    n_qubits: int
    gates: tuple[Gate, ...]

    def __post_init__(self):
        if self.n_qubits < 1:
            raise CircuitError(f"n_qubits must be positive, got {self.n_qubits}")
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if g.target >= self.n_qubits:
                raise CircuitError(f"gate target {g.target} out of range for {self.n_qubits} qubits")
            if g.control is not None and g.control >= self.n_qubits:
                raise CircuitError(f"gate control {g.control} out of range for {self.n_qubits} qubits")

    def __len__(self) -> int:
        return len(self.gates)


def adjoint(circuit: QuantumCircuit) -> QuantumCircuit:
    """Inverse circuit: reversed gate order, negated rotation angles.

    Hadamard and CNOT are self-adjoint and pass through unchanged, so
    ``adjoint(adjoint(c))`` reproduces ``c`` gate for gate.
    """
    rev = []
    for g in reversed(circuit.gates):
        if g.kind in (KIND_RX, KIND_RY):
            rev.append(Gate(g.kind, g.target, angle=-g.angle))
        else:
            rev.append(g)
    return QuantumCircuit(circuit.n_qubits, tuple(rev))


def pack_gates(circuit: QuantumCircuit):
    """Flatten gates into the parallel-array form the hot loops consume."""
    n = len(circuit.gates)
    kinds = np.empty(n, dtype=np.int64)
    targets = np.empty(n, dtype=np.int64)
    controls = np.full(n, -1, dtype=np.int64)
    angles = np.zeros(n, dtype=np.float64)
    for i, g in enumerate(circuit.gates):
        kinds[i] = g.kind
        targets[i] = g.target
        if g.control is not None:
            controls[i] = g.control
        if g.angle is not None:
            angles[i] = g.angle
    return kinds, targets, controls, angles


def circuit_to_json(circuit: QuantumCircuit) -> str:
    """Debug dump: qubit count plus one record per gate."""
    gates = [
        {"kind": g.name, "target": g.target, "control": g.control, "angle": g.angle}
        for g in circuit.gates
    ]
    return json.dumps({"n_qubits": circuit.n_qubits, "gates": gates})


def circuit_from_json(text: str) -> QuantumCircuit:
    doc = json.loads(text)
    gates = tuple(
        Gate(
            _NAME_KINDS[g["kind"]],
            g["target"],
            control=g.get("control"),
            angle=g.get("angle"),
        )
        for g in doc["gates"]
    )
    return QuantumCircuit(doc["n_qubits"], gates)
