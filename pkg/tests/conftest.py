import numpy as np
import pytest

from qtamper.circuits import QuantumCircuit, cnot, hadamard, rot_x, rot_y


def random_circuit(rng, n_qubits, n_gates):
    """Seeded random circuit over the supported gate set."""
    gates = []
    for _ in range(n_gates):
        kind = rng.integers(4)
        target = int(rng.integers(n_qubits))
        if kind == 0:
            gates.append(hadamard(target))
        elif kind == 1:
            gates.append(rot_x(float(rng.uniform(-np.pi, np.pi)), target))
        elif kind == 2:
            gates.append(rot_y(float(rng.uniform(-np.pi, np.pi)), target))
        else:
            if n_qubits == 1:
                gates.append(hadamard(target))
                continue
            control = int(rng.integers(n_qubits))
            while control == target:
                control = int(rng.integers(n_qubits))
            gates.append(cnot(control, target))
    return QuantumCircuit(n_qubits, tuple(gates))


@pytest.fixture(scope="session", autouse=True)
def warm_backend():
    """Trigger JIT compilation once so timed tests measure compute only."""
    from qtamper import run_circuit, zero_state

    circuit = random_circuit(np.random.default_rng(0), 2, 8)
    run_circuit(circuit, zero_state(2))
