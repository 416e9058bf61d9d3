import numpy as np
import pytest

from qtamper import (
    DOT_PRODUCT,
    QUANTUM_FIDELITY,
    FeatureMapSpec,
    dot_kernel,
    feature_map_circuit,
    fidelity,
    kernel_matrix,
    regularize_psd,
)
from qtamper.circuits import KIND_CNOT, KIND_H, KIND_RX, KIND_RY
from qtamper.qkernel import pair_seed, save_kernel_csv
from qtamper.errors import ConfigurationError, EncodingError

SQRT2_INV = 1.0 / np.sqrt(2.0)


# --------------------------------------------------- independent dense oracle

def _h():
    return np.array([[1, 1], [1, -1]], dtype=complex) * SQRT2_INV

def _rx(t):
    c, s = np.cos(t / 2), np.sin(t / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])

def _ry(t):
    c, s = np.cos(t / 2), np.sin(t / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)

def _embed_1q(matrix, target, n):
    # LSB ordering: kron runs from the highest qubit down to the lowest
    out = np.eye(1, dtype=complex)
    for q in range(n - 1, -1, -1):
        out = np.kron(out, matrix if q == target else np.eye(2, dtype=complex))
    return out

def _cnot_dense(control, target, n):
    dim = 1 << n
    out = np.zeros((dim, dim), dtype=complex)
    for i in range(dim):
        j = i ^ (1 << target) if (i >> control) & 1 else i
        out[j, i] = 1.0
    return out

def dense_feature_unitary(x, spec):
    """Full 2^n x 2^n unitary of the encoding circuit, built from krons."""
    n = spec.n_qubits
    angles = np.clip(np.asarray(x, dtype=float) * spec.angle_scale,
                     -spec.angle_clip, spec.angle_clip)
    U = np.eye(1 << n, dtype=complex)
    for q in range(n):
        U = _embed_1q(_rx(angles[2 * q]), q, n) @ U
        U = _embed_1q(_ry(angles[2 * q + 1]), q, n) @ U
    for q in range(n):
        U = _embed_1q(_h(), q, n) @ U
    for q in range(n - 1):
        U = _cnot_dense(q, q + 1, n) @ U
    return U

def dense_fidelity(x, y, spec):
    Ux = dense_feature_unitary(x, spec)
    Uy = dense_feature_unitary(y, spec)
    e0 = np.zeros(Ux.shape[0], dtype=complex)
    e0[0] = 1.0
    return abs(e0 @ (Uy.conj().T @ (Ux @ e0))) ** 2


# ------------------------------------------------------------- circuit shape

def test_feature_map_gate_counts_and_order():
    spec = FeatureMapSpec(n_qubits=6)
    circuit = feature_map_circuit(np.zeros(12), spec)
    assert len(circuit) == 23  # 12 rotations + 6 H + 5 CNOTs
    kinds = [g.kind for g in circuit.gates]
    assert kinds[:12] == [KIND_RX, KIND_RY] * 6
    assert kinds[12:18] == [KIND_H] * 6
    assert kinds[18:] == [KIND_CNOT] * 5
    for q, gate in enumerate(circuit.gates[18:]):
        assert gate.control == q and gate.target == q + 1

def test_feature_map_clips_angles():
    spec = FeatureMapSpec(n_qubits=6, angle_scale=1.0)
    x = np.zeros(12)
    x[0] = 10.0
    circuit = feature_map_circuit(x, spec)
    assert circuit.gates[0].angle == np.pi

def test_feature_map_single_qubit_has_no_cnot():
    spec = FeatureMapSpec(n_qubits=1, angle_scale=1.0)
    circuit = feature_map_circuit((0.3, -0.5), spec)
    assert [g.kind for g in circuit.gates] == [KIND_RX, KIND_RY, KIND_H]
    assert circuit.gates[0].angle == 0.3
    assert circuit.gates[1].angle == -0.5

def test_feature_map_rejects_bad_inputs():
    spec = FeatureMapSpec(n_qubits=2)
    with pytest.raises(EncodingError):
        feature_map_circuit([0.1, 0.2, 0.3], spec)
    with pytest.raises(EncodingError):
        feature_map_circuit([0.1, np.inf, 0.0, 0.0], spec)

def test_spec_validation():
    assert FeatureMapSpec(n_qubits=6).n_features == 12
    with pytest.raises(ConfigurationError):
        FeatureMapSpec(n_qubits=0)
    with pytest.raises(ConfigurationError):
        FeatureMapSpec(n_qubits=2, angle_clip=0.0)


# ----------------------------------------------------------------- fidelity

def test_fidelity_with_self_is_one():
    spec = FeatureMapSpec(n_qubits=3)
    rng = np.random.default_rng(3)
    for _ in range(5):
        x = rng.standard_normal(6)
        assert abs(fidelity(x, x, spec) - 1.0) < 1e-10

def test_fidelity_orthogonal_pair_single_qubit():
    # oracle: Rx(pi)|0> = -i|1>, so the two encoded states are orthogonal
    spec = FeatureMapSpec(n_qubits=1, angle_scale=1.0)
    x, y = np.array([0.0, 0.0]), np.array([np.pi, 0.0])
    assert dense_fidelity(x, y, spec) < 1e-20
    assert fidelity(x, y, spec) < 1e-20

def test_fidelity_matches_dense_unitary_oracle():
    spec = FeatureMapSpec(n_qubits=6)
    rng = np.random.default_rng(5)
    for _ in range(10):
        x = rng.standard_normal(12) * 2
        y = rng.standard_normal(12) * 2
        assert abs(fidelity(x, y, spec) - dense_fidelity(x, y, spec)) < 1e-10

def test_fidelity_rejects_dimension_mismatch():
    spec = FeatureMapSpec(n_qubits=2)
    with pytest.raises(EncodingError):
        fidelity([0.1, 0.2], [0.1, 0.2, 0.3, 0.4], spec)


# ---------------------------------------------------------------- dot kernel

def test_dot_kernel_examples():
    assert dot_kernel((1, 2), (3, 4)) == 11.0
    assert dot_kernel((5.0, -2.0), (0.0, 0.0)) == 0.0
    x = np.array([1.5, -2.0, 0.5])
    assert abs(dot_kernel(x, x) - np.linalg.norm(x) ** 2) < 1e-14

def test_dot_kernel_rejects_length_mismatch():
    with pytest.raises(EncodingError):
        dot_kernel([1, 2], [1, 2, 3])


# ------------------------------------------------------------- kernel matrix

def test_identical_rows_give_all_ones():
    spec = FeatureMapSpec(n_qubits=6)
    X = np.tile(np.linspace(-1, 1, 12), (3, 1))
    K = kernel_matrix(X, spec=spec)
    assert np.allclose(K.values, 1.0, atol=1e-10)

def test_dot_kind_orthonormal_rows():
    K = kernel_matrix(np.array([[1.0, 0.0], [0.0, 1.0]]), kind=DOT_PRODUCT)
    assert np.array_equal(K.values, np.eye(2))

def test_gram_matrix_is_exactly_symmetric_with_unit_diagonal():
    spec = FeatureMapSpec(n_qubits=6)
    X = np.random.default_rng(9).standard_normal((12, 12))
    K = kernel_matrix(X, spec=spec)
    assert np.array_equal(K.values, K.values.T)
    assert np.max(np.abs(np.diag(K.values) - 1.0)) < 1e-10
    assert K.values.min() >= 0.0
    assert K.values.max() <= 1.0 + 1e-12

def test_gram_matrix_is_psd():
    spec = FeatureMapSpec(n_qubits=6)
    rng = np.random.default_rng(13)
    for _ in range(5):
        X = rng.standard_normal((20, 12))
        K = kernel_matrix(X, spec=spec)
        assert np.linalg.eigvalsh(K.values).min() >= -1e-8

def test_gram_entries_match_per_pair_fidelity():
    # the cached-statevector fast path must agree with the composed-circuit route
    spec = FeatureMapSpec(n_qubits=3)
    rng = np.random.default_rng(15)
    X = rng.standard_normal((5, 6))
    K = kernel_matrix(X, spec=spec)
    for i in range(5):
        for j in range(5):
            assert abs(K.values[i, j] - fidelity(X[i], X[j], spec)) < 1e-12

def test_permutation_equivariance():
    spec = FeatureMapSpec(n_qubits=2)
    rng = np.random.default_rng(17)
    X = rng.standard_normal((6, 4))
    perm = rng.permutation(6)
    K = kernel_matrix(X, spec=spec).values
    Kp = kernel_matrix(X[perm], spec=spec).values
    assert np.allclose(Kp, K[np.ix_(perm, perm)], atol=1e-14)

def test_rectangular_kernel_matrix():
    spec = FeatureMapSpec(n_qubits=2)
    rng = np.random.default_rng(19)
    X, Y = rng.standard_normal((4, 4)), rng.standard_normal((7, 4))
    K = kernel_matrix(X, Y, spec=spec)
    assert K.values.shape == (4, 7)
    assert not K.symmetric
    assert abs(K.values[2, 3] - fidelity(X[2], Y[3], spec)) < 1e-12

def test_kernel_matrix_rejects_empty_input():
    with pytest.raises(ConfigurationError):
        kernel_matrix(np.empty((0, 4)), spec=FeatureMapSpec(n_qubits=2))


# -------------------------------------------------------------- shot kernels

def test_shot_estimates_converge():
    spec = FeatureMapSpec(n_qubits=3)
    rng = np.random.default_rng(21)
    within = 0
    trials = 40
    for t in range(trials):
        x, y = rng.standard_normal(6), rng.standard_normal(6)
        exact = fidelity(x, y, spec)
        est = fidelity(x, y, spec, shots=10_000, seed=t)
        within += abs(est - exact) <= 0.05
    assert within >= int(0.95 * trials)

def test_shot_gram_is_symmetric_and_deterministic():
    spec = FeatureMapSpec(n_qubits=2)
    X = np.random.default_rng(23).standard_normal((4, 4))
    K1 = kernel_matrix(X, spec=spec, shots=256, seed=7)
    K2 = kernel_matrix(X, spec=spec, shots=256, seed=7)
    K3 = kernel_matrix(X, spec=spec, shots=256, seed=8)
    assert np.array_equal(K1.values, K2.values)
    assert not np.array_equal(K1.values, K3.values)
    assert np.array_equal(K1.values, K1.values.T)
    assert K1.values.min() >= 0.0 and K1.values.max() <= 1.0

def test_pair_seed_is_stable():
    assert pair_seed(42, 3, 5) == pair_seed(42, 3, 5)
    assert pair_seed(42, 3, 5) != pair_seed(42, 5, 3)


# ---------------------------------------------------------------- psd repair

def test_regularize_psd_zero_jitter_is_identity():
    K = kernel_matrix(np.eye(3), kind=DOT_PRODUCT)
    K2 = regularize_psd(K, 0.0)
    assert np.array_equal(K.values, K2.values)

def test_regularize_psd_shifts_diagonal():
    K = kernel_matrix(np.eye(2), kind=DOT_PRODUCT)
    K2 = regularize_psd(K, 1e-8)
    assert np.allclose(np.diag(K2.values), 1 + 1e-8)

def test_regularize_psd_shifts_spectrum():
    # indefinite symmetric matrix: jitter shifts every eigenvalue up by itself
    values = np.array([[1.0, 0.99], [0.99, 1.0]]) - 1.5 * np.eye(2)
    from qtamper.qkernel import KernelMatrix

    K = KernelMatrix(values, DOT_PRODUCT, True)
    eps = -np.linalg.eigvalsh(values).min()
    K2 = regularize_psd(K, 2 * eps)
    assert np.linalg.eigvalsh(K2.values).min() >= eps - 1e-12

def test_regularize_psd_rejects_negative_jitter():
    K = kernel_matrix(np.eye(2), kind=DOT_PRODUCT)
    with pytest.raises(ConfigurationError):
        regularize_psd(K, -1e-9)


# --------------------------------------------------------------------- CSV

def test_kernel_csv_export(tmp_path):
    spec = FeatureMapSpec(n_qubits=2)
    X = np.random.default_rng(29).standard_normal((3, 4))
    K = kernel_matrix(X, spec=spec)
    path = tmp_path / "kernel.csv"
    save_kernel_csv(K, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "k_0,k_1,k_2"
    parsed = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
    assert np.array_equal(parsed, K.values)
