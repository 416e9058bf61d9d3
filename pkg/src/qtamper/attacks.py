"""Tampering attacks: label flipping, targeted poisoning, anomaly
injection for single-class data, and FGSM-style feature perturbation.

Every attack is a pure, seeded transform returning the tampered dataset
together with a ground-truth mask of the altered rows.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import FeatureDataset, save_features_csv
from .errors import AttackError, ConfigurationError, TrainingError

ATTACK_KINDS = ("label_flip", "targeted_poison", "adv_perturb", "inject_anomalies")


@dataclass(frozen=True)
class AttackSpec:
    kind: str
    rate: float = 0.3
    epsilon: float = 0.1
    magnitude: float = 3.0
    source_class: int = 0
    target_class: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ATTACK_KINDS:
            raise ConfigurationError(f"unknown attack kind {self.kind!r}")
        if not 0 < self.rate <= 1:
            raise ConfigurationError(f"rate must be in (0, 1], got {self.rate}")
        if self.epsilon <= 0:
            raise ConfigurationError(f"epsilon must be positive, got {self.epsilon}")
        if self.magnitude <= 0:
            raise ConfigurationError(f"magnitude must be positive, got {self.magnitude}")
        if self.kind == "targeted_poison" and self.source_class == self.target_class:
            raise ConfigurationError("source and target class must differ")


@dataclass(frozen=True)
class TamperedDataset:
    features: np.ndarray
    labels: np.ndarray
    tamper_mask: np.ndarray
    class_count: int

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]


def _as_tampered(features, labels, mask, class_count) -> TamperedDataset:
    return TamperedDataset(
        np.asarray(features, dtype=np.float64),
        np.asarray(labels, dtype=np.int64),
        np.asarray(mask, dtype=bool),
        class_count,
    )


def flip_labels(clean: FeatureDataset, rate: float, seed: int) -> TamperedDataset:
    """Relabel floor(rate*N) uniformly chosen samples to a different class."""
    if not 0 < rate <= 1:
        raise ConfigurationError(f"rate must be in (0, 1], got {rate}")
    if clean.class_count < 2:
        raise AttackError("label flipping needs >= 2 classes; use inject_anomalies for one-class data")
    rng = np.random.default_rng(seed)
    n_flip = int(rate * clean.n_samples)
    chosen = rng.choice(clean.n_samples, size=n_flip, replace=False)
    labels = clean.labels.copy()
    for i in chosen:
        others = [c for c in range(clean.class_count) if c != labels[i]]
        labels[i] = others[rng.integers(len(others))]
    mask = np.zeros(clean.n_samples, dtype=bool)
    mask[chosen] = True
    return _as_tampered(clean.features, labels, mask, clean.class_count)


def targeted_poison(clean: FeatureDataset, source_class: int, target_class: int,
                    rate: float, seed: int) -> TamperedDataset:
    """Relabel floor(rate * |source class|) source-class samples to the target class."""
    if not 0 < rate <= 1:
        raise ConfigurationError(f"rate must be in (0, 1], got {rate}")
    if source_class == target_class:
        raise ConfigurationError("source and target class must differ")
    for c in (source_class, target_class):
        if not np.any(clean.labels == c):
            raise AttackError(f"class {c} is not present in the dataset")
    rng = np.random.default_rng(seed)
    source_idx = np.flatnonzero(clean.labels == source_class)
    n_poison = int(rate * source_idx.shape[0])
    chosen = rng.choice(source_idx, size=n_poison, replace=False)
    labels = clean.labels.copy()
    labels[chosen] = target_class
    mask = np.zeros(clean.n_samples, dtype=bool)
    mask[chosen] = True
    return _as_tampered(clean.features, labels, mask, clean.class_count)


def inject_anomalies(clean: FeatureDataset, rate: float, magnitude: float,
                     seed: int) -> TamperedDataset:
    """Displace floor(rate*N) rows by ``magnitude`` in standardized units.

    Each chosen row moves along a seeded random unit direction whose
    components are then scaled by the per-feature std of the clean data,
    so the displacement has L2 length ``magnitude`` when measured in
    per-feature-std units. The one-class analog of poisoning.
    """
    if not 0 < rate <= 1:
        raise ConfigurationError(f"rate must be in (0, 1], got {rate}")
    if magnitude <= 0:
        raise ConfigurationError(f"magnitude must be positive, got {magnitude}")
    rng = np.random.default_rng(seed)
    n_inject = int(rate * clean.n_samples)
    chosen = rng.choice(clean.n_samples, size=n_inject, replace=False)
    stds = clean.features.std(axis=0)
    stds = np.where(stds == 0, 1.0, stds)
    features = clean.features.copy()
    for i in chosen:
        direction = rng.standard_normal(clean.n_features)
        direction /= np.linalg.norm(direction)
        features[i] = features[i] + magnitude * direction * stds
    mask = np.zeros(clean.n_samples, dtype=bool)
    mask[chosen] = True
    return _as_tampered(features, clean.labels, mask, clean.class_count)


class SurrogateModel:
    """Multinomial logistic model fit by full-batch gradient descent.

    Serves as the white-box gradient source for FGSM. Zero initialization
    plus full-batch updates make the fit independent of row order.
    """

    def __init__(self, weights, biases, classes, train_accuracy, converged):
        self.weights = weights          # C x d
        self.biases = biases            # C
        self.classes = classes
        self.train_accuracy = train_accuracy
        self.converged = converged

    def _probabilities(self, X):
        logits = X @ self.weights.T + self.biases
        logits -= logits.max(axis=1, keepdims=True)
        e = np.exp(logits)
        return e / e.sum(axis=1, keepdims=True)

    def predict(self, X):
        return np.argmax(self._probabilities(np.atleast_2d(X)), axis=1)

    def loss(self, X, y):
        p = self._probabilities(np.atleast_2d(X))
        return float(-np.mean(np.log(p[np.arange(len(y)), y] + 1e-300)))

    def input_gradient(self, X, y):
        """Gradient of the per-sample cross-entropy w.r.t. the features."""
        X = np.atleast_2d(X)
        p = self._probabilities(X)
        p[np.arange(len(y)), y] -= 1.0
        return p @ self.weights


def train_surrogate(clean: FeatureDataset, learning_rate: float = 0.5,
                    max_iterations: int = 2000) -> SurrogateModel:
    """Fit the FGSM surrogate on a labeled dataset."""
    if clean.class_count < 2:
        raise TrainingError("surrogate training needs >= 2 classes")
    counts = np.bincount(clean.labels, minlength=clean.class_count)
    if counts.min() < 10:
        raise TrainingError(f"every class needs >= 10 samples, got counts {counts.tolist()}")
    X, y = clean.features, clean.labels
    n, d = X.shape
    C = clean.class_count
    W = np.zeros((C, d))
    b = np.zeros(C)
    onehot = np.zeros((n, C))
    onehot[np.arange(n), y] = 1.0
    for _ in range(max_iterations):
        logits = X @ W.T + b
        logits -= logits.max(axis=1, keepdims=True)
        e = np.exp(logits)
        p = e / e.sum(axis=1, keepdims=True)
        err = (p - onehot) / n
        grad_w = err.T @ X
        grad_b = err.sum(axis=0)
        W -= learning_rate * grad_w
        b -= learning_rate * grad_b
        if max(np.abs(grad_w).max(), np.abs(grad_b).max()) < 1e-7:
            break
    model = SurrogateModel(W, b, list(range(C)), 0.0, False)
    accuracy = float(np.mean(model.predict(X) == y))
    model.train_accuracy = accuracy
    model.converged = accuracy >= 0.9
    return model


def fgsm_perturb(clean: FeatureDataset, epsilon: float,
                 surrogate: SurrogateModel | None = None,
                 score_fn=None, seed: int = 0) -> TamperedDataset:
    """Shift every sample by epsilon * sign(input-loss gradient).

    Labeled data uses the surrogate's analytic gradient; single-class
    data needs ``score_fn`` (an anomaly score to be minimized), whose
    gradient is estimated by central finite differences with step 1e-4
    and negated. Coordinates with zero gradient are left unchanged. The
    transform is deterministic; ``seed`` is accepted for interface
    symmetry with the other attacks.
    """
    del seed
    if epsilon <= 0:
        raise ConfigurationError(f"epsilon must be positive, got {epsilon}")
    X = clean.features
    if surrogate is not None:
        grad = surrogate.input_gradient(X, clean.labels)
    elif score_fn is not None:
        step = 1e-4
        grad = np.zeros_like(X)
        for j in range(X.shape[1]):
            hi = X.copy()
            lo = X.copy()
            hi[:, j] += step
            lo[:, j] -= step
            grad[:, j] = -(np.asarray(score_fn(hi)) - np.asarray(score_fn(lo))) / (2 * step)
    else:
        raise AttackError("fgsm needs a surrogate model or a score function")
    delta = epsilon * np.sign(grad)
    features = X + delta
    mask = np.any(features != X, axis=1)
    return _as_tampered(features, clean.labels, mask, clean.class_count)


def apply_attack(clean: FeatureDataset, spec: AttackSpec) -> TamperedDataset:
    """Dispatch an AttackSpec; one-class data routes label_flip to inject_anomalies."""
    if spec.kind == "label_flip":
        if clean.class_count == 1:
            return inject_anomalies(clean, spec.rate, spec.magnitude, spec.seed)
        return flip_labels(clean, spec.rate, spec.seed)
    if spec.kind == "inject_anomalies":
        return inject_anomalies(clean, spec.rate, spec.magnitude, spec.seed)
    if spec.kind == "targeted_poison":
        if clean.class_count == 1:
            raise AttackError("targeted poisoning needs labeled multi-class data")
        return targeted_poison(clean, spec.source_class, spec.target_class, spec.rate, spec.seed)
    if spec.kind == "adv_perturb":
        if clean.class_count == 1:
            from .ocsvm import one_class_score_fn

            score = one_class_score_fn(clean.features)
            return fgsm_perturb(clean, spec.epsilon, score_fn=score, seed=spec.seed)
        surrogate = train_surrogate(clean)
        return fgsm_perturb(clean, spec.epsilon, surrogate=surrogate, seed=spec.seed)
    raise ConfigurationError(f"unknown attack kind {spec.kind!r}")


def save_tampered_csv(tampered: TamperedDataset, path):
    """Feature CSV plus the trailing tampered 0/1 column."""
    dataset = FeatureDataset(tampered.features, tampered.labels, tampered.class_count)
    save_features_csv(dataset, path, tamper_mask=tampered.tamper_mask)
