"""Datasets: synthetic generators, CSV ingestion, and feature extraction.

The synthetic profiles mirror the shapes of the three sensor datasets the
detection pipeline targets (one class / 12 features, two classes / 24,
three classes / 60) without modeling waveforms: detection behavior is
driven by feature geometry, so Gaussian class clusters are enough.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, ExtractionError, ParseError

FEATURE_NAMES = (
    "mean", "std", "min", "max", "median", "iqr",
    "skewness", "kurtosis", "rms", "zcr", "ptp", "mad",
)

PROFILES = {
    "one_class": (1, 12),
    "two_class": (2, 24),
    "three_class": (3, 60),
}


@dataclass(frozen=True)
class TimeSeries:
    channels: dict[str, np.ndarray]
    sampling_rate_hz: float
    subject_id: str

    def __post_init__(self):
        lengths = {len(v) for v in self.channels.values()}
        if len(lengths) > 1:
            raise ConfigurationError(f"channels have unequal lengths: {sorted(lengths)}")
        if self.sampling_rate_hz <= 0:
            raise ConfigurationError(f"sampling rate must be positive, got {self.sampling_rate_hz}")

    @property
    def length(self) -> int:
        return len(next(iter(self.channels.values())))


@dataclass(frozen=True)
class FeatureDataset:
    features: np.ndarray
    labels: np.ndarray
    class_count: int
    feature_names: tuple[str, ...] = ()
    provenance: str = ""

    def __post_init__(self):
        features = np.atleast_2d(np.asarray(self.features, dtype=np.float64))
        labels = np.asarray(self.labels, dtype=np.int64)
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)
        if features.shape[1] < 1:
            raise ConfigurationError("feature dimension must be positive")
        if features.shape[0] != labels.shape[0]:
            raise ConfigurationError(
                f"{features.shape[0]} feature rows but {labels.shape[0]} labels"
            )
        if not np.all(np.isfinite(features)):
            raise ConfigurationError("features contain NaN or Inf")
        if labels.size and (labels.min() < 0 or labels.max() >= self.class_count):
            raise ConfigurationError(
                f"labels must lie in [0, {self.class_count}), got range "
                f"[{labels.min()}, {labels.max()}]"
            )
        if not self.feature_names:
            object.__setattr__(
                self, "feature_names", tuple(f"f_{i}" for i in range(features.shape[1]))
            )

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]


def extract_features(window) -> np.ndarray:
    """Twelve time-domain statistics of one signal window.

    Order: mean, std, min, max, median, interquartile range, skewness,
    excess kurtosis, RMS, zero-crossing rate, peak-to-peak, mean absolute
    deviation. Skewness and kurtosis are defined as 0 for constant
    windows; the zero-crossing rate counts strict sign changes between
    consecutive samples over (len - 1).
    """
    x = np.asarray(window, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] < 4:
        raise ExtractionError(f"window must be 1-D with at least 4 samples, got shape {x.shape}")
    mean = x.mean()
    centered = x - mean
    m2 = np.mean(centered**2)
    std = np.sqrt(m2)
    if m2 > 0:
        skew = np.mean(centered**3) / m2**1.5
        kurt = np.mean(centered**4) / m2**2 - 3.0
    else:
        skew = 0.0
        kurt = 0.0
    q75, q25 = np.percentile(x, [75, 25])
    zcr = np.count_nonzero(x[:-1] * x[1:] < 0) / (x.shape[0] - 1)
    return np.array([
        mean,
        std,
        x.min(),
        x.max(),
        np.median(x),
        q75 - q25,
        skew,
        kurt,
        np.sqrt(np.mean(x**2)),
        zcr,
        x.max() - x.min(),
        np.abs(centered).mean(),
    ])


def synth_generate(profile: str, n_per_class: int, d: int | None = None,
                   separation: float = 6.0, seed: int = 0) -> FeatureDataset:
    """Seeded Gaussian class clusters shaped like the target datasets.

    Class means sit ``separation`` apart (mean pairwise distance) along
    random directions; covariance is diagonal with mild random anisotropy
    around 1. Row order is shuffled so folds do not align with classes.
    """
    if profile not in PROFILES:
        raise ConfigurationError(f"unknown profile {profile!r}, expected one of {sorted(PROFILES)}")
    class_count, default_d = PROFILES[profile]
    d = default_d if d is None else d
    if n_per_class < 10:
        raise ConfigurationError(f"n_per_class must be >= 10, got {n_per_class}")
    if d < 2:
        raise ConfigurationError(f"d must be >= 2, got {d}")
    rng = np.random.default_rng(seed)
    if class_count == 1:
        means = np.zeros((1, d))
    else:
        means = rng.standard_normal((class_count, d))
        means -= means.mean(axis=0)
        dists = [
            np.linalg.norm(means[i] - means[j])
            for i in range(class_count)
            for j in range(i + 1, class_count)
        ]
        means *= separation / np.mean(dists)
    blocks, labels = [], []
    for c in range(class_count):
        scales = rng.uniform(0.8, 1.25, size=d)
        blocks.append(rng.standard_normal((n_per_class, d)) * scales + means[c])
        labels.append(np.full(n_per_class, c, dtype=np.int64))
    features = np.vstack(blocks)
    labels = np.concatenate(labels)
    order = rng.permutation(features.shape[0])
    return FeatureDataset(
        features[order], labels[order], class_count,
        provenance=f"synthetic(profile={profile}, seed={seed})",
    )


def save_features_csv(dataset: FeatureDataset, path, tamper_mask=None):
    """Write ``f_0,...,f_{d-1},label`` rows; append a ``tampered`` column when a mask is given."""
    path = Path(path)
    header = [f"f_{i}" for i in range(dataset.n_features)] + ["label"]
    if tamper_mask is not None:
        header.append("tampered")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for i in range(dataset.n_samples):
            cells = [repr(float(v)) for v in dataset.features[i]]
            cells.append(str(int(dataset.labels[i])))
            if tamper_mask is not None:
                cells.append(str(int(bool(tamper_mask[i]))))
            fh.write(",".join(cells) + "\n")


def _read_csv_rows(path):
    path = Path(path)
    if not path.exists():
        raise ParseError(f"no such file: {path}")
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ParseError("empty file", line=1)
    return [line.split(",") for line in lines]


def load_features_csv(path) -> FeatureDataset:
    """Read a feature CSV; a trailing ``tampered`` column is ignored here."""
    dataset, _ = load_features_csv_with_mask(path)
    return dataset


def load_features_csv_with_mask(path):
    """Read a feature CSV, returning (dataset, tamper_mask_or_None)."""
    rows = _read_csv_rows(path)
    header = rows[0]
    has_mask = header and header[-1] == "tampered"
    ncols = len(header)
    d = ncols - (2 if has_mask else 1)
    if d < 1 or header[:d] != [f"f_{i}" for i in range(d)] or header[d] != "label":
        raise ParseError(f"bad header {','.join(header)!r}, expected f_0,...,label", line=1)
    if len(rows) == 1:
        raise ParseError("empty dataset: no rows after the header", line=1)
    features, labels, mask = [], [], []
    for lineno, cells in enumerate(rows[1:], start=2):
        if len(cells) != ncols:
            raise ParseError(f"expected {ncols} cells, found {len(cells)}", line=lineno)
        try:
            features.append([float(c) for c in cells[:d]])
        except ValueError as exc:
            raise ParseError(f"non-numeric feature cell: {exc}", line=lineno) from None
        try:
            label = int(cells[d])
        except ValueError:
            raise ParseError(f"non-integer label {cells[d]!r}", line=lineno) from None
        if label < 0:
            raise ParseError(f"negative label {label}", line=lineno)
        labels.append(label)
        if has_mask:
            if cells[d + 1] not in ("0", "1"):
                raise ParseError(f"tampered cell must be 0 or 1, got {cells[d + 1]!r}", line=lineno)
            mask.append(cells[d + 1] == "1")
    labels = np.asarray(labels, dtype=np.int64)
    dataset = FeatureDataset(
        np.asarray(features), labels, int(labels.max()) + 1,
        provenance=f"ingested({path})",
    )
    return dataset, (np.asarray(mask, dtype=bool) if has_mask else None)


def load_timeseries_csv(path) -> TimeSeries:
    """Read ``t,<channels...>`` rows with strictly increasing ``t``."""
    rows = _read_csv_rows(path)
    header = rows[0]
    if len(header) < 2 or header[0] != "t":
        raise ParseError(f"bad header {','.join(header)!r}, expected t,<channel names>", line=1)
    names = header[1:]
    if len(rows) == 1:
        raise ParseError("empty time series: no rows after the header", line=1)
    times, columns = [], [[] for _ in names]
    for lineno, cells in enumerate(rows[1:], start=2):
        if len(cells) != len(header):
            raise ParseError(f"expected {len(header)} cells, found {len(cells)}", line=lineno)
        try:
            values = [float(c) for c in cells]
        except ValueError as exc:
            raise ParseError(f"non-numeric cell: {exc}", line=lineno) from None
        if times and values[0] <= times[-1]:
            raise ParseError(f"time column must be strictly increasing at t={values[0]}", line=lineno)
        times.append(values[0])
        for k, v in enumerate(values[1:]):
            columns[k].append(v)
    times = np.asarray(times)
    rate = 1.0 / float(np.median(np.diff(times))) if len(times) > 1 else 1.0
    channels = {name: np.asarray(col) for name, col in zip(names, columns)}
    return TimeSeries(channels, rate, subject_id=Path(path).stem)


def windowed_features(ts: TimeSeries, window_len: int, stride: int) -> FeatureDataset:
    """Per-window statistics of every channel, concatenated channel-major.

    Each window position contributes one row of 12 * n_channels features;
    rows are unlabeled (single class 0).
    """
    if window_len < 4:
        raise ExtractionError(f"window_len must be >= 4, got {window_len}")
    if stride < 1:
        raise ExtractionError(f"stride must be >= 1, got {stride}")
    if window_len > ts.length:
        raise ExtractionError(f"window_len {window_len} exceeds series length {ts.length}")
    starts = range(0, ts.length - window_len + 1, stride)
    stat_names = tuple(
        f"{ch}_{stat}" for ch in ts.channels for stat in FEATURE_NAMES
    )
    rows = []
    for s in starts:
        parts = [extract_features(ts.channels[ch][s: s + window_len]) for ch in ts.channels]
        rows.append(np.concatenate(parts))
    features = np.vstack(rows)
    return FeatureDataset(
        features, np.zeros(features.shape[0], dtype=np.int64), 1,
        feature_names=stat_names, provenance=f"windowed({ts.subject_id})",
    )
