"""Tampering detection for physiological sensor features.

Builds a quantum-fidelity kernel on a built-in statevector simulator,
trains a from-scratch nu-one-class SVM on it, and measures how well the
resulting anomaly detector flags poisoned or perturbed samples compared
to a classical dot-product-kernel baseline.
"""
from .backend import active_backend
from .circuits import Gate, QuantumCircuit, adjoint, cnot, hadamard, rot_x, rot_y
from .statevector import (
    StateVector,
    apply_gate,
    run_circuit,
    sample_zero_probability,
    zero_probability,
    zero_state,
)
from .qkernel import (
    DOT_PRODUCT,
    QUANTUM_FIDELITY,
    FeatureMapSpec,
    KernelMatrix,
    dot_kernel,
    feature_map_circuit,
    fidelity,
    kernel_matrix,
    regularize_psd,
)
from .preprocess import (
    PcaModel,
    StandardizerModel,
    histogram_encode,
    moving_average_downsample,
    pca_apply,
    pca_fit,
    standardize_apply,
    standardize_fit,
)
from .data import (
    FeatureDataset,
    TimeSeries,
    extract_features,
    load_features_csv,
    load_timeseries_csv,
    save_features_csv,
    synth_generate,
    windowed_features,
)
from .attacks import (
    AttackSpec,
    TamperedDataset,
    apply_attack,
    fgsm_perturb,
    flip_labels,
    inject_anomalies,
    targeted_poison,
    train_surrogate,
)
from .ocsvm import (
    DualProblem,
    OcsvmModel,
    brute_force_dual,
    csvm_predict,
    decision,
    predict,
    train,
    train_binary_csvm,
)
from .evaluate import (
    EvalReport,
    FoldPlan,
    attack_impact,
    compare_methods,
    detect_tampering,
    kfold_split,
)
from .config import ExperimentConfig, load_config

__version__ = "0.1.0"
