"""Experiment protocol: cross-validation, attack impact, and detection.

Detection trains one-class models on a held-clean reference and scores a
parallel suspect set: per fold and per class, the model is fit on the
clean training rows of that class, and every suspect validation row is
scored against the model of its claimed (possibly tampered) label. A
flipped sample therefore looks anomalous to the class it pretends to be.

All randomness flows from explicit seeds; a master seed fans out to
sub-seeds through label hashing so an entire experiment is reproducible
from one integer.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .attacks import AttackSpec, TamperedDataset, apply_attack
from .config import ExperimentConfig
from .data import FeatureDataset, load_features_csv, synth_generate
from .errors import ConfigurationError, EvaluationError
from .ocsvm import (
    DualProblem,
    decision_values,
    train,
    train_binary_csvm,
    train_multiclass_csvm,
    multiclass_predict,
)
from .preprocess import pca_apply, pca_fit, standardize_apply, standardize_fit
from .qkernel import DOT_PRODUCT, QUANTUM_FIDELITY, FeatureMapSpec, kernel_matrix


def derive_seed(master_seed: int, label: str) -> int:
    """Stable sub-seed for ``label`` under a master seed."""
    digest = hashlib.sha256(f"{master_seed}:{label}".encode()).digest()
    return int.from_bytes(digest[:8], "big") & 0x7FFFFFFFFFFFFFFF


def _sha256_of(arrays) -> str:
    h = hashlib.sha256()
    for a in arrays:
        h.update(np.ascontiguousarray(a).tobytes())
    return h.hexdigest()


@dataclass(frozen=True)
class FoldPlan:
    k: int
    assignments: np.ndarray
    stratified: bool
    seed: int

    @property
    def n_samples(self) -> int:
        return self.assignments.shape[0]


def kfold_split(labels, k: int, stratified: bool = True, seed: int = 0) -> FoldPlan:
    """Seeded partition into k near-equal folds.

    Stratified mode partitions within each class first and staggers the
    remainder assignment across classes so global fold sizes still differ
    by at most one.
    """
    labels = np.asarray(labels, dtype=np.int64)
    n = labels.shape[0]
    if k < 2:
        raise EvaluationError(f"fold count must be >= 2, got {k}")
    if n < k:
        raise EvaluationError(f"cannot split {n} samples into {k} folds")
    rng = np.random.default_rng(seed)
    assignments = np.empty(n, dtype=np.int64)
    if not stratified:
        perm = rng.permutation(n)
        base, rem = divmod(n, k)
        start = 0
        for f in range(k):
            size = base + (1 if f < rem else 0)
            assignments[perm[start:start + size]] = f
            start += size
    else:
        offset = 0
        for c in np.unique(labels):
            idx = rng.permutation(np.flatnonzero(labels == c))
            base, rem = divmod(idx.shape[0], k)
            start = 0
            for f in range(k):
                size = base + (1 if (f - offset) % k < rem else 0)
                assignments[idx[start:start + size]] = f
                start += size
            offset = (offset + rem) % k
    return FoldPlan(k, assignments, stratified, seed)


@dataclass
class EvalReport:
    per_fold: list
    mean_accuracy: float
    config_echo: dict
    seeds: dict
    checksums: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "per_fold": self.per_fold,
            "mean_accuracy": self.mean_accuracy,
            "config_echo": self.config_echo,
            "seeds": self.seeds,
            "checksums": self.checksums,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def _preprocess_fold(clean_X, suspect_X, train_mask, pca_k):
    """Fit standardize+PCA on the clean training rows, apply to both sides."""
    standardizer = standardize_fit(clean_X[train_mask])
    clean_std = standardize_apply(standardizer, clean_X)
    suspect_std = standardize_apply(standardizer, suspect_X)
    if pca_k is None:
        return clean_std, suspect_std, (standardizer.means, standardizer.stds)
    pca = pca_fit(clean_std[train_mask], pca_k)
    return (
        pca_apply(pca, clean_std),
        pca_apply(pca, suspect_std),
        (standardizer.means, standardizer.stds, pca.components),
    )


def _gram(rows, refs, kernel_kind, feature_map, shots, seed):
    if kernel_kind == QUANTUM_FIDELITY:
        if refs is None:
            return kernel_matrix(rows, spec=feature_map, kind=kernel_kind,
                                 shots=shots, seed=seed)
        return kernel_matrix(rows, refs, spec=feature_map, kind=kernel_kind,
                             shots=shots, seed=seed)
    if refs is None:
        return kernel_matrix(rows, kind=DOT_PRODUCT)
    return kernel_matrix(rows, refs, kind=DOT_PRODUCT)


def detect_tampering(
    clean_reference: FeatureDataset,
    suspect: TamperedDataset,
    kernel_kind: str,
    nu: float,
    fold_plan: FoldPlan,
    *,
    feature_map: FeatureMapSpec | None = None,
    pca_k: int | None = 12,
    tolerance: float = 1e-6,
    max_iterations: int = 100_000,
    shots: int | None = None,
    shot_seed: int = 0,
    min_class_train: int = 5,
) -> EvalReport:
    """Score a suspect set against per-class one-class models.

    Accuracy counts correctly flagged tampered rows plus correctly passed
    clean rows; for labeled data it is computed per class and macro
    averaged, for single-class data it is the plain ratio.
    """
    if suspect.n_samples == 0:
        raise EvaluationError("suspect dataset is empty")
    if clean_reference.n_samples != suspect.n_samples:
        raise EvaluationError(
            f"clean reference has {clean_reference.n_samples} rows but suspect has "
            f"{suspect.n_samples}; the two must be parallel"
        )
    if clean_reference.features.shape[1] != suspect.features.shape[1]:
        raise EvaluationError("clean reference and suspect must share the feature dimension")
    if fold_plan.n_samples != suspect.n_samples:
        raise EvaluationError("fold plan does not match the dataset size")
    if kernel_kind == QUANTUM_FIDELITY:
        if feature_map is None:
            raise ConfigurationError("quantum detection needs a FeatureMapSpec")
        width = pca_k if pca_k is not None else clean_reference.features.shape[1]
        if width != feature_map.n_features:
            raise ConfigurationError(
                f"feature width {width} does not fit {feature_map.n_qubits} qubits "
                f"({feature_map.n_features} features)"
            )

    single_class = clean_reference.class_count == 1
    class_ids = [0] if single_class else sorted(np.unique(clean_reference.labels).tolist())

    per_fold = []
    preprocess_arrays = []
    for f in range(fold_plan.k):
        tr = fold_plan.assignments != f
        va = fold_plan.assignments == f
        clean_Z, suspect_Z, pp = _preprocess_fold(
            clean_reference.features, suspect.features, tr, pca_k
        )
        preprocess_arrays.extend(pp)

        flagged = np.zeros(suspect.n_samples, dtype=bool)
        scored = np.zeros(suspect.n_samples, dtype=bool)
        class_accs = []
        for c in class_ids:
            refs_mask = tr if single_class else tr & (clean_reference.labels == c)
            n_refs = int(refs_mask.sum())
            if n_refs < min_class_train:
                raise EvaluationError(
                    f"class {c} has only {n_refs} clean training samples in fold {f} "
                    f"(need >= {min_class_train})"
                )
            va_mask = va if single_class else va & (suspect.labels == c)
            if not va_mask.any():
                continue
            refs = clean_Z[refs_mask]
            K = _gram(refs, None, kernel_kind, feature_map, shots,
                      derive_seed(shot_seed, f"train:{f}:{c}"))
            model = train(
                DualProblem(K.values, nu, tolerance, max_iterations),
                kernel_kind=kernel_kind, training_refs=refs,
            )
            rows = _gram(suspect_Z[va_mask], model.training_refs, kernel_kind,
                         feature_map, shots, derive_seed(shot_seed, f"score:{f}:{c}"))
            outlier = decision_values(model, rows.values) < 0
            flagged[va_mask] = outlier
            scored[va_mask] = True
            truth = suspect.tamper_mask[va_mask]
            class_accs.append(float(np.mean(outlier == truth)))

        va_scored = scored & va
        truth = suspect.tamper_mask[va_scored]
        calls = flagged[va_scored]
        tampered = int(truth.sum())
        untampered = int((~truth).sum())
        tpr = float(np.mean(calls[truth])) if tampered else None
        tnr = float(np.mean(~calls[~truth])) if untampered else None
        accuracy = (
            float(np.mean(calls == truth)) if single_class else float(np.mean(class_accs))
        )
        per_fold.append({
            "fold": f,
            "detection_accuracy": accuracy,
            "true_positive_rate": tpr,
            "true_negative_rate": tnr,
        })

    mean_accuracy = float(np.mean([entry["detection_accuracy"] for entry in per_fold]))
    return EvalReport(
        per_fold=per_fold,
        mean_accuracy=mean_accuracy,
        config_echo={
            "kernel_kind": kernel_kind,
            "nu": nu,
            "pca_k": pca_k,
            "tolerance": tolerance,
            "max_iterations": max_iterations,
            "shots": shots,
            "folds": fold_plan.k,
            "stratified": fold_plan.stratified,
            "feature_map": None if feature_map is None else {
                "n_qubits": feature_map.n_qubits,
                "angle_clip": feature_map.angle_clip,
                "angle_scale": feature_map.angle_scale,
            },
        },
        seeds={"fold_seed": fold_plan.seed, "shot_seed": shot_seed},
        checksums={
            "fold_plan": _sha256_of([fold_plan.assignments]),
            "tamper_mask": _sha256_of([suspect.tamper_mask]),
            "preprocess": _sha256_of(preprocess_arrays),
        },
    )


def attack_impact(
    dataset: FeatureDataset,
    attack: AttackSpec,
    *,
    folds: int = 5,
    seed: int = 0,
    C: float = 1.0,
    nu: float = 0.1,
) -> dict:
    """Baseline-classifier accuracy before and after an attack.

    Labeled data: a dot-kernel C-SVM (one-vs-rest beyond two classes) is
    trained per fold on clean vs. attacked training rows, always measured
    on clean validation rows. Single-class data falls back to the
    one-class inlier rate under the same scheme.
    """
    if dataset.class_count == 1 and attack.kind == "targeted_poison":
        raise EvaluationError("targeted poisoning is undefined for one-class data")
    tampered = apply_attack(dataset, attack)
    plan = kfold_split(dataset.labels, folds, stratified=dataset.class_count > 1, seed=seed)

    clean_scores, attacked_scores = [], []
    for f in range(plan.k):
        tr = plan.assignments != f
        va = plan.assignments == f
        arms = (
            (dataset.features, dataset.labels, clean_scores),
            (tampered.features, tampered.labels, attacked_scores),
        )
        for train_features, train_labels, out in arms:
            # each arm standardizes with its own training statistics;
            # validation rows are always the clean features/labels
            standardizer = standardize_fit(train_features[tr])
            Ztr = standardize_apply(standardizer, train_features[tr])
            Zva = standardize_apply(standardizer, dataset.features[va])
            K = Ztr @ Ztr.T
            rows = Zva @ Ztr.T
            if dataset.class_count == 1:
                model = train(DualProblem(K, nu), kernel_kind=DOT_PRODUCT, training_refs=Ztr)
                rows_sv = rows[:, model.support_indices]
                out.append(float(np.mean(decision_values(model, rows_sv) >= 0)))
            elif dataset.class_count == 2:
                y = np.where(train_labels[tr] == 1, 1.0, -1.0)
                model = train_binary_csvm(K, y, C=C)
                pred = (model.decision_values(rows[:, model.support_indices]) >= 0).astype(int)
                out.append(float(np.mean(pred == dataset.labels[va])))
            else:
                models = train_multiclass_csvm(K, train_labels[tr], dataset.class_count, C=C)
                pred = multiclass_predict(models, rows)
                out.append(float(np.mean(pred == dataset.labels[va])))

    return {
        "clean_accuracy": float(np.mean(clean_scores)),
        "attacked_accuracy": float(np.mean(attacked_scores)),
        "per_fold_clean": clean_scores,
        "per_fold_attacked": attacked_scores,
    }


def _load_dataset(config: ExperimentConfig) -> FeatureDataset:
    ds = config.dataset
    if ds.csv is not None:
        return load_features_csv(ds.csv)
    return synth_generate(
        ds.profile, ds.n_per_class, ds.d, ds.separation,
        seed=derive_seed(config.master_seed, "dataset"),
    )


def compare_methods(config: ExperimentConfig) -> dict:
    """Run the paired classical/quantum detection experiment.

    Both arms consume the identical dataset, attack output, fold plan,
    and fold-wise preprocessing (verified by checksums in the report);
    only the kernel differs. The returned document is JSON-ready and
    fully reconstructs the experiment.
    """
    config.validate()
    clean = _load_dataset(config)
    attack = AttackSpec(
        kind=config.attack.kind,
        rate=config.attack.rate,
        epsilon=config.attack.epsilon,
        magnitude=config.attack.magnitude,
        source_class=config.attack.source_class,
        target_class=config.attack.target_class,
        seed=derive_seed(config.master_seed, "attack"),
    )
    suspect = apply_attack(clean, attack)
    fold_plan = kfold_split(
        suspect.labels, config.eval.folds, config.eval.stratified,
        seed=derive_seed(config.master_seed, "folds"),
    )
    feature_map = FeatureMapSpec(
        n_qubits=config.kernel.qubits,
        angle_clip=config.kernel.angle_clip,
        angle_scale=config.kernel.angle_scale,
    )
    shots = config.kernel.shots if config.kernel.estimator == "shots" else None
    common = dict(
        nu=config.svm.nu,
        fold_plan=fold_plan,
        pca_k=config.preprocessing.pca_k,
        tolerance=config.svm.tolerance,
        max_iterations=config.svm.max_iterations,
        shot_seed=derive_seed(config.master_seed, "shots"),
    )
    classical = detect_tampering(clean, suspect, DOT_PRODUCT, **common)
    quantum = detect_tampering(clean, suspect, QUANTUM_FIDELITY,
                               feature_map=feature_map, shots=shots, **common)
    checksums_match = (
        classical.checksums["fold_plan"] == quantum.checksums["fold_plan"]
        and classical.checksums["tamper_mask"] == quantum.checksums["tamper_mask"]
        and classical.checksums["preprocess"] == quantum.checksums["preprocess"]
    )

    impact = None
    if clean.class_count >= 2:
        impact = attack_impact(
            clean, attack, folds=config.eval.folds,
            seed=derive_seed(config.master_seed, "impact_folds"),
            C=config.svm.c, nu=config.svm.nu,
        )

    return {
        "config": config.to_dict(),
        "dataset": {
            "provenance": clean.provenance,
            "n_samples": clean.n_samples,
            "n_features": clean.n_features,
            "class_count": clean.class_count,
        },
        "attack": {
            "kind": attack.kind,
            "rate": attack.rate,
            "epsilon": attack.epsilon,
            "magnitude": attack.magnitude,
            "tampered_rows": int(suspect.tamper_mask.sum()),
        },
        "seeds": {
            "master": config.master_seed,
            "dataset": derive_seed(config.master_seed, "dataset"),
            "attack": attack.seed,
            "folds": fold_plan.seed,
            "shots": common["shot_seed"],
        },
        "classical": classical.to_dict(),
        "quantum": quantum.to_dict(),
        "delta_accuracy": quantum.mean_accuracy - classical.mean_accuracy,
        "checksums_match": checksums_match,
        "attack_impact": impact,
    }


def report_to_json(report: dict) -> str:
    """Deterministic serialization: same report dict, same bytes."""
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def report_table_rows(report: dict) -> list[dict]:
    """Flat rows mirroring the detection summary table."""
    dataset = report["dataset"]
    rows = []
    for method, key in (("classical", "classical"), ("quantum", "quantum")):
        arm = report[key]
        rows.append({
            "method": method,
            "dataset": dataset["provenance"],
            "classes": dataset["class_count"],
            "features": arm["config_echo"]["pca_k"] or dataset["n_features"],
            "attack_type": report["attack"]["kind"],
            "detection_pct": round(100.0 * arm["mean_accuracy"], 3),
        })
    return rows
