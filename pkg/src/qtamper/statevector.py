"""Dense statevector simulation over the H/Rx/Ry/CNOT gate set.

All operations are pure: inputs are never mutated and fresh statevectors
are returned. Amplitudes are complex128 and are not renormalized between
gates, so norm drift is observable (and tested) rather than hidden.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .backend import gateloops
from .circuits import Gate, QuantumCircuit, pack_gates
from .errors import CircuitError, ConfigurationError

MAX_QUBITS = 24  # 2^24 complex doubles is ~256 MB; refuse anything bigger


@dataclass(frozen=True)
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def zero_state(n_qubits: int) -> StateVector:
    """|0...0> on ``n_qubits`` qubits."""
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise ConfigurationError(f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits}")
    amps = np.zeros(1 << n_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(n_qubits, amps)


def _check_gate(state: StateVector, gate: Gate):
    if gate.target >= state.n_qubits:
        raise CircuitError(f"gate target {gate.target} out of range for {state.n_qubits} qubits")
    if gate.control is not None and gate.control >= state.n_qubits:
        raise CircuitError(f"gate control {gate.control} out of range for {state.n_qubits} qubits")


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    """Apply one gate, returning a new statevector."""
    _check_gate(state, gate)
    circuit = QuantumCircuit(state.n_qubits, (gate,))
    amps = state.amplitudes.copy()
    gateloops.run_program(amps, *pack_gates(circuit))
    return StateVector(state.n_qubits, amps)


def run_circuit(circuit: QuantumCircuit, initial: StateVector) -> StateVector:
    """Apply every gate of ``circuit`` in sequence order."""
    if circuit.n_qubits != initial.n_qubits:
        raise CircuitError(
            f"circuit has {circuit.n_qubits} qubits but state has {initial.n_qubits}"
        )
    amps = initial.amplitudes.copy()
    gateloops.run_program(amps, *pack_gates(circuit))
    return StateVector(initial.n_qubits, amps)


def zero_probability(state: StateVector) -> float:
    """Probability of measuring the all-zeros basis state."""
    return float(abs(state.amplitudes[0]) ** 2)


def sample_zero_probability(state: StateVector, shots: int, seed: int) -> float:
    """Shot-based estimate of ``zero_probability``.

    Draws ``shots`` basis-state samples from |amplitudes|^2 and returns
    the fraction landing on index 0. Deterministic for a given seed.
    """
    if shots < 1:
        raise ConfigurationError(f"shots must be >= 1, got {shots}")
    probs = np.abs(state.amplitudes) ** 2
    probs = probs / probs.sum()
    rng = np.random.default_rng(seed)
    outcomes = rng.choice(probs.shape[0], size=shots, p=probs)
    return float(np.mean(outcomes == 0))
