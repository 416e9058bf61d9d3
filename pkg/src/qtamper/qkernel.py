"""Feature-map circuits and kernel matrices.

A feature vector of length 2n is encoded on n qubits: qubit q carries
Rx(feature 2q) then Ry(feature 2q+1), followed by a Hadamard on every
qubit and a linear CNOT chain q -> q+1. Angles are the feature values
times ``angle_scale``, clipped to [-angle_clip, +angle_clip].

The rotations come before the Hadamard layer: with Hadamards first, |+>
is an X eigenstate and every Rx angle would collapse into a global phase,
dropping half the features from the kernel.

The quantum kernel is the fidelity |<0..0| U(y)^dag U(x) |0..0>|^2; the
classical baseline is the plain dot product.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuits import QuantumCircuit, adjoint, cnot, hadamard, rot_x, rot_y
from .errors import ConfigurationError, EncodingError
from .statevector import run_circuit, sample_zero_probability, zero_probability, zero_state

QUANTUM_FIDELITY = "quantum_fidelity"
DOT_PRODUCT = "dot_product"


@dataclass(frozen=True)
class FeatureMapSpec:
    """Shape and scaling of the encoding circuit.

    ``n_features`` is always twice ``n_qubits``; entanglement is a fixed
    linear chain. ``angle_scale`` is the radians-per-feature-unit factor
    (the source material leaves the constant open; 0.5 keeps standardized
    features well inside one period and is the package default).
    """

    n_qubits: int
    angle_clip: float = math.pi
    angle_scale: float = 0.5

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ConfigurationError(f"n_qubits must be positive, got {self.n_qubits}")
        if not self.angle_clip > 0:
            raise ConfigurationError(f"angle_clip must be positive, got {self.angle_clip}")
        if not self.angle_scale > 0:
            raise ConfigurationError(f"angle_scale must be positive, got {self.angle_scale}")

    @property
    def n_features(self) -> int:
        return 2 * self.n_qubits


@dataclass(frozen=True)
class KernelMatrix:
    values: np.ndarray
    kind: str
    symmetric: bool


def _encoding_angles(x, spec: FeatureMapSpec) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != spec.n_features:
        raise EncodingError(
            f"feature vector has length {x.shape[0] if x.ndim == 1 else x.shape}, "
            f"expected {spec.n_features}"
        )
    if not np.all(np.isfinite(x)):
        raise EncodingError("feature vector contains non-finite entries")
    return np.clip(x * spec.angle_scale, -spec.angle_clip, spec.angle_clip)


def feature_map_circuit(x, spec: FeatureMapSpec) -> QuantumCircuit:
    """Encoding circuit for one feature vector."""
    angles = _encoding_angles(x, spec)
    gates = []
    for q in range(spec.n_qubits):
        gates.append(rot_x(angles[2 * q], q))
        gates.append(rot_y(angles[2 * q + 1], q))
    for q in range(spec.n_qubits):
        gates.append(hadamard(q))
    for q in range(spec.n_qubits - 1):
        gates.append(cnot(q, q + 1))
    return QuantumCircuit(spec.n_qubits, tuple(gates))


def _encoded_state(x, spec: FeatureMapSpec) -> np.ndarray:
    return run_circuit(feature_map_circuit(x, spec), zero_state(spec.n_qubits)).amplitudes


def fidelity(x, y, spec: FeatureMapSpec, shots: int | None = None, seed: int = 0) -> float:
    """Kernel value between two feature vectors.

    Runs the encoding circuit for ``x`` followed by the adjoint of the
    circuit for ``y`` and measures the all-zeros probability; with
    ``shots`` set, the probability is estimated by sampling instead of
    read from the amplitude, and clamped to [0, 1].
    """
    composed = run_circuit(
        adjoint(feature_map_circuit(y, spec)),
        run_circuit(feature_map_circuit(x, spec), zero_state(spec.n_qubits)),
    )
    if shots is None:
        return zero_probability(composed)
    return min(1.0, max(0.0, sample_zero_probability(composed, shots, seed)))


def dot_kernel(x, y) -> float:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise EncodingError(f"length mismatch: {x.shape} vs {y.shape}")
    return float(np.dot(x, y))


def pair_seed(base_seed: int, i: int, j: int) -> int:
    """Deterministic per-pair sampling seed for shot-mode Gram entries."""
    return (int(base_seed) ^ (i * 0x9E3779B1 + j * 0x85EBCA77)) & 0x7FFFFFFFFFFFFFFF


def kernel_matrix(
    X,
    Y=None,
    *,
    spec: FeatureMapSpec | None = None,
    kind: str = QUANTUM_FIDELITY,
    shots: int | None = None,
    seed: int = 0,
) -> KernelMatrix:
    """Gram matrix between the rows of ``X`` and ``Y`` (or ``X`` itself).

    With ``Y=None`` only the upper triangle is computed and mirrored, so
    symmetry is exact. Exact quantum mode encodes each row once and takes
    pairwise statevector overlaps; shot mode runs the composed circuit
    per pair with a seed derived from (seed, i, j).
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[0] == 0:
        raise ConfigurationError("kernel_matrix needs at least one row")
    symmetric = Y is None
    Y = X if symmetric else np.atleast_2d(np.asarray(Y, dtype=np.float64))

    if kind == DOT_PRODUCT:
        if X.shape[1] != Y.shape[1]:
            raise EncodingError(f"row length mismatch: {X.shape[1]} vs {Y.shape[1]}")
        values = X @ Y.T
    elif kind == QUANTUM_FIDELITY:
        if spec is None:
            raise ConfigurationError("quantum kernel needs a FeatureMapSpec")
        if shots is None:
            VX = np.array([_encoded_state(row, spec) for row in X])
            VY = VX if symmetric else np.array([_encoded_state(row, spec) for row in Y])
            values = np.abs(VX @ VY.conj().T) ** 2
            np.clip(values, 0.0, 1.0, out=values)
        else:
            values = np.empty((X.shape[0], Y.shape[0]))
            for i in range(X.shape[0]):
                start = i if symmetric else 0
                for j in range(start, Y.shape[0]):
                    values[i, j] = fidelity(
                        X[i], Y[j], spec, shots=shots, seed=pair_seed(seed, i, j)
                    )
    else:
        raise ConfigurationError(f"unknown kernel kind {kind!r}")

    if symmetric:
        upper = np.triu(values)
        values = upper + np.triu(values, 1).T
    return KernelMatrix(values, kind, symmetric)


def regularize_psd(K: KernelMatrix, jitter: float) -> KernelMatrix:
    """Add ``jitter`` to the diagonal to absorb shot-noise negativity."""
    if jitter < 0:
        raise ConfigurationError(f"jitter must be >= 0, got {jitter}")
    if jitter == 0:
        return K
    values = K.values + jitter * np.eye(K.values.shape[0])
    return KernelMatrix(values, K.kind, K.symmetric)


def save_kernel_csv(K: KernelMatrix, path):
    """Write the matrix row-major with a k_0..k_{M-1} header."""
    header = ",".join(f"k_{j}" for j in range(K.values.shape[1]))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(header + "\n")
        for row in K.values:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
