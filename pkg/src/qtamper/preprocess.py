"""Moving-average downsampling, histogram encoding, z-scoring, and PCA.

Fit/apply are split so models can be fit on a training fold only and then
applied to held-out data.
"""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import PreprocessingError


def moving_average_downsample(series, w: int):
    """Mean over non-overlapping windows of length ``w``.

    The stride equals the window length, so the output has floor(len/w)
    entries; a trailing partial window is dropped.
    """
    series = np.asarray(series, dtype=np.float64)
    if w < 1:
        raise PreprocessingError(f"window length must be positive, got {w}")
    if series.shape[0] < w:
        raise PreprocessingError(f"series of length {series.shape[0]} is shorter than window {w}")
    n = series.shape[0] // w
    return series[: n * w].reshape(n, w).mean(axis=1)


def histogram_encode(column):
    """Replace each categorical value by its relative frequency in the column."""
    column = list(column)
    if not column:
        raise PreprocessingError("cannot histogram-encode an empty column")
    counts = Counter(column)
    total = len(column)
    return np.array([counts[v] / total for v in column])


@dataclass(frozen=True)
class StandardizerModel:
    means: np.ndarray
    stds: np.ndarray

    def to_json(self) -> str:
        return json.dumps({"means": self.means.tolist(), "stds": self.stds.tolist()})

    @classmethod
    def from_json(cls, text: str) -> "StandardizerModel":
        doc = json.loads(text)
        return cls(np.asarray(doc["means"], dtype=np.float64),
                   np.asarray(doc["stds"], dtype=np.float64))


def standardize_fit(X) -> StandardizerModel:
    """Per-column mean and population standard deviation."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[0] < 2:
        raise PreprocessingError(f"standardization needs at least 2 rows, got {X.shape[0]}")
    return StandardizerModel(X.mean(axis=0), X.std(axis=0))


def standardize_apply(model: StandardizerModel, X) -> np.ndarray:
    """Z-score columns; constant columns (std 0) map to all zeros."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[1] != model.means.shape[0]:
        raise PreprocessingError(
            f"data has {X.shape[1]} columns but model was fit on {model.means.shape[0]}"
        )
    stds = np.where(model.stds == 0, 1.0, model.stds)
    out = (X - model.means) / stds
    out[:, model.stds == 0] = 0.0
    return out


@dataclass(frozen=True)
class PcaModel:
    components: np.ndarray  # k x d, orthonormal rows
    center: np.ndarray
    explained_variance: np.ndarray

    def to_json(self) -> str:
        return json.dumps({
            "center": self.center.tolist(),
            "components": self.components.tolist(),
            "explained_variance": self.explained_variance.tolist(),
        })

    @classmethod
    def from_json(cls, text: str) -> "PcaModel":
        doc = json.loads(text)
        return cls(
            np.asarray(doc["components"], dtype=np.float64),
            np.asarray(doc["center"], dtype=np.float64),
            np.asarray(doc["explained_variance"], dtype=np.float64),
        )


def pca_fit(X, k: int) -> PcaModel:
    """Top-k principal components of the sample covariance.

    Computed through the SVD of the centered data; components are ordered
    by non-increasing explained variance, and each row's sign is fixed so
    its largest-magnitude entry is positive.
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    n, d = X.shape
    if not 1 <= k <= min(n - 1, d):
        raise PreprocessingError(f"k={k} must be in [1, min(N-1, d)] = [1, {min(n - 1, d)}]")
    center = X.mean(axis=0)
    _, s, vt = np.linalg.svd(X - center, full_matrices=False)
    components = vt[:k].copy()
    explained = s[:k] ** 2 / (n - 1)
    for row in components:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1.0
    return PcaModel(components, center, explained)


def pca_apply(model: PcaModel, X) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[1] != model.center.shape[0]:
        raise PreprocessingError(
            f"data has {X.shape[1]} columns but model was fit on {model.center.shape[0]}"
        )
    return (X - model.center) @ model.components.T
