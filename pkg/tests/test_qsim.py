import numpy as np
import pytest

from qtamper import (
    StateVector,
    adjoint,
    apply_gate,
    run_circuit,
    sample_zero_probability,
    zero_probability,
    zero_state,
)
from qtamper.circuits import (
    QuantumCircuit,
    circuit_from_json,
    circuit_to_json,
    cnot,
    hadamard,
    pack_gates,
    rot_x,
    rot_y,
)
from qtamper.errors import CircuitError, ConfigurationError

from conftest import random_circuit

SQRT2_INV = 1.0 / np.sqrt(2.0)


def h_matrix():
    return np.array([[1, 1], [1, -1]], dtype=complex) * SQRT2_INV

def rx_matrix(theta):
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])

def ry_matrix(phi):
    c, s = np.cos(phi / 2), np.sin(phi / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


# ---------------------------------------------------------------- zero_state

def test_zero_state_one_qubit():
    assert np.array_equal(zero_state(1).amplitudes, [1, 0])

def test_zero_state_two_qubits():
    assert np.array_equal(zero_state(2).amplitudes, [1, 0, 0, 0])

def test_zero_state_six_qubits():
    state = zero_state(6)
    assert state.amplitudes.shape == (64,)
    assert state.amplitudes[0] == 1.0
    assert np.count_nonzero(state.amplitudes) == 1

@pytest.mark.parametrize("bad", [0, -1, 25])
def test_zero_state_rejects_out_of_range(bad):
    with pytest.raises(ConfigurationError):
        zero_state(bad)


# ---------------------------------------------------------------- apply_gate

def test_hadamard_on_zero():
    state = apply_gate(zero_state(1), hadamard(0))
    assert np.allclose(state.amplitudes, [SQRT2_INV, SQRT2_INV])

def test_rx_pi_gives_minus_i_one():
    state = apply_gate(zero_state(1), rot_x(np.pi, 0))
    assert np.allclose(state.amplitudes, [0, -1j], atol=1e-15)

def test_cnot_control1_target0_maps_10_to_11():
    # |10> in binary (qubit 1 set) is amplitude index 2
    amps = np.zeros(4, dtype=complex)
    amps[2] = 1.0
    state = apply_gate(StateVector(2, amps), cnot(1, 0))
    expected = np.zeros(4, dtype=complex)
    expected[3] = 1.0
    assert np.array_equal(state.amplitudes, expected)

def test_single_qubit_gates_match_matrices_on_basis_states():
    gates = [
        (hadamard(0), h_matrix()),
        (rot_x(0.7, 0), rx_matrix(0.7)),
        (rot_y(-1.3, 0), ry_matrix(-1.3)),
    ]
    for gate, matrix in gates:
        for basis in range(2):
            amps = np.zeros(2, dtype=complex)
            amps[basis] = 1.0
            out = apply_gate(StateVector(1, amps), gate)
            assert np.allclose(out.amplitudes, matrix[:, basis], atol=1e-15)

def test_cnot_matches_4x4_truth_table():
    # control = qubit 0, target = qubit 1, LSB ordering: |q1 q0>
    mapping = {0: 0, 1: 3, 2: 2, 3: 1}
    for src, dst in mapping.items():
        amps = np.zeros(4, dtype=complex)
        amps[src] = 1.0
        out = apply_gate(StateVector(2, amps), cnot(0, 1))
        assert out.amplitudes[dst] == 1.0
        assert np.count_nonzero(out.amplitudes) == 1

def test_apply_gate_is_pure():
    state = zero_state(1)
    apply_gate(state, hadamard(0))
    assert np.array_equal(state.amplitudes, [1, 0])

def test_apply_gate_rejects_bad_index():
    with pytest.raises(CircuitError):
        apply_gate(zero_state(2), hadamard(2))


# --------------------------------------------------------------- run_circuit

def test_empty_circuit_is_identity():
    rng = np.random.default_rng(1)
    amps = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    amps /= np.linalg.norm(amps)
    state = StateVector(2, amps)
    out = run_circuit(QuantumCircuit(2, ()), state)
    assert np.array_equal(out.amplitudes, amps)

def test_double_hadamard_returns_zero():
    out = run_circuit(QuantumCircuit(1, (hadamard(0), hadamard(0))), zero_state(1))
    assert np.allclose(out.amplitudes, [1, 0], atol=1e-15)

def test_h_then_rx_matches_matrix_product():
    # independent oracle: explicit 2x2 products
    expected = rx_matrix(np.pi / 2) @ h_matrix() @ np.array([1, 0], dtype=complex)
    out = run_circuit(QuantumCircuit(1, (hadamard(0), rot_x(np.pi / 2, 0))), zero_state(1))
    assert np.allclose(out.amplitudes, expected, atol=1e-14)
    assert abs(np.linalg.norm(out.amplitudes) - 1.0) < 1e-12

def test_run_circuit_rejects_qubit_mismatch():
    with pytest.raises(CircuitError):
        run_circuit(QuantumCircuit(2, ()), zero_state(3))


# ------------------------------------------------------------------- adjoint

def test_adjoint_of_hadamard_is_hadamard():
    circuit = QuantumCircuit(1, (hadamard(0),))
    assert adjoint(circuit).gates == circuit.gates

def test_adjoint_reverses_and_negates():
    circuit = QuantumCircuit(2, (rot_x(0.7, 0), rot_y(0.2, 1)))
    rev = adjoint(circuit)
    assert rev.gates == (rot_y(-0.2, 1), rot_x(-0.7, 0))

def test_double_adjoint_roundtrip():
    rng = np.random.default_rng(7)
    circuit = random_circuit(rng, 3, 40)
    assert adjoint(adjoint(circuit)).gates == circuit.gates

def test_unitarity_roundtrip_returns_zero_state():
    rng = np.random.default_rng(11)
    for _ in range(10):
        circuit = random_circuit(rng, 4, 60)
        state = run_circuit(circuit, zero_state(4))
        back = run_circuit(adjoint(circuit), state)
        expected = np.zeros(16, dtype=complex)
        expected[0] = 1.0
        assert np.allclose(back.amplitudes, expected, atol=1e-10)

def test_unitarity_roundtrip_on_random_states():
    rng = np.random.default_rng(13)
    for _ in range(5):
        amps = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        amps /= np.linalg.norm(amps)
        state = StateVector(3, amps)
        circuit = random_circuit(rng, 3, 50)
        back = run_circuit(adjoint(circuit), run_circuit(circuit, state))
        assert np.allclose(back.amplitudes, amps, atol=1e-9)


# ---------------------------------------------------------------- invariants

def test_norm_preserved_over_long_random_circuits():
    rng = np.random.default_rng(17)
    for n_qubits in (2, 4, 6):
        circuit = random_circuit(rng, n_qubits, 200)
        out = run_circuit(circuit, zero_state(n_qubits))
        assert abs(out.norm() - 1.0) < 1e-9


# ----------------------------------------------------------- zero_probability

def test_zero_probability_of_zero_state():
    assert zero_probability(zero_state(3)) == 1.0

def test_zero_probability_after_hadamard():
    state = apply_gate(zero_state(1), hadamard(0))
    assert abs(zero_probability(state) - 0.5) < 1e-14

def test_zero_probability_after_rx_pi():
    state = apply_gate(zero_state(1), rot_x(np.pi, 0))
    assert zero_probability(state) < 1e-30


# ------------------------------------------------------------------ sampling

def test_sampling_point_mass():
    assert sample_zero_probability(zero_state(2), shots=100, seed=5) == 1.0

def test_sampling_orthogonal_state():
    state = apply_gate(zero_state(1), rot_x(np.pi, 0))
    assert sample_zero_probability(state, shots=100, seed=5) == 0.0

def test_sampling_is_deterministic_per_seed():
    state = apply_gate(zero_state(1), hadamard(0))
    a = sample_zero_probability(state, shots=1000, seed=42)
    b = sample_zero_probability(state, shots=1000, seed=42)
    c = sample_zero_probability(state, shots=1000, seed=43)
    assert a == b
    assert a != c

def test_sampling_concentrates_around_half():
    state = apply_gate(zero_state(1), hadamard(0))
    hits = sum(
        abs(sample_zero_probability(state, shots=10_000, seed=seed) - 0.5) <= 0.05
        for seed in range(100)
    )
    assert hits >= 95

def test_sampling_is_unbiased():
    # mean over many seeds within 3 binomial sigma of the exact probability
    state = apply_gate(zero_state(1), rot_y(1.1, 0))
    p = zero_probability(state)
    shots = 200
    estimates = [sample_zero_probability(state, shots=shots, seed=s) for s in range(1000)]
    sigma = np.sqrt(p * (1 - p) / shots) / np.sqrt(len(estimates))
    assert abs(np.mean(estimates) - p) <= 3 * sigma

def test_sampling_rejects_zero_shots():
    with pytest.raises(ConfigurationError):
        sample_zero_probability(zero_state(1), shots=0, seed=0)


# ---------------------------------------------------------- gate validation

def test_gate_rejects_nan_angle():
    with pytest.raises(CircuitError):
        rot_x(np.nan, 0)

def test_cnot_rejects_equal_control_target():
    with pytest.raises(CircuitError):
        cnot(1, 1)

def test_circuit_rejects_out_of_range_gate():
    with pytest.raises(CircuitError):
        QuantumCircuit(1, (cnot(0, 1),))


# ------------------------------------------------------------ serialization

def test_circuit_json_roundtrip():
    rng = np.random.default_rng(23)
    circuit = random_circuit(rng, 3, 25)
    again = circuit_from_json(circuit_to_json(circuit))
    assert again.n_qubits == circuit.n_qubits
    assert again.gates == circuit.gates


# ------------------------------------------------------- backend equivalence

def test_numpy_and_numba_backends_agree():
    nb = pytest.importorskip("qtamper._gateloops_nb")
    from qtamper import _gateloops_np as npb

    rng = np.random.default_rng(29)
    for _ in range(10):
        circuit = random_circuit(rng, 5, 80)
        packed = pack_gates(circuit)
        amps = rng.standard_normal(32) + 1j * rng.standard_normal(32)
        amps /= np.linalg.norm(amps)
        out_np = npb.run_program(amps.copy(), *packed)
        out_nb = nb.run_program(amps.copy(), *packed)
        np.testing.assert_allclose(out_nb, out_np, rtol=0, atol=1e-14)
