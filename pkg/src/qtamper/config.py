"""Declarative experiment configuration.

Configs are TOML documents mirroring ``ExperimentConfig``; every field
has a default matching the reference pipeline (window 60, PCA to 12,
6 qubits, 5 folds). Validation happens up front so a bad config fails
before any compute starts.
"""
from __future__ import annotations

import math
import sys
from dataclasses import asdict, dataclass, field

from .attacks import ATTACK_KINDS
from .errors import ConfigurationError

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


@dataclass
class DatasetConfig:
    profile: str | None = "two_class"
    csv: str | None = None
    n_per_class: int = 100
    d: int | None = None
    separation: float = 6.0


@dataclass
class PreprocessingConfig:
    window: int = 60
    pca_k: int = 12


@dataclass
class AttackConfig:
    kind: str = "label_flip"
    rate: float = 0.3
    epsilon: float = 0.1
    magnitude: float = 3.0
    source_class: int = 0
    target_class: int = 1


@dataclass
class KernelConfig:
    qubits: int = 6
    estimator: str = "exact"
    shots: int = 10_000
    angle_clip: float = math.pi
    angle_scale: float = 0.5


@dataclass
class SvmConfig:
    nu: float = 0.1
    tolerance: float = 1e-6
    max_iterations: int = 100_000
    c: float = 1.0


@dataclass
class EvalConfig:
    folds: int = 5
    stratified: bool = True


@dataclass
class ExperimentConfig:
    dataset: DatasetConfig = field(default_factory=DatasetConfig)
    preprocessing: PreprocessingConfig = field(default_factory=PreprocessingConfig)
    attack: AttackConfig = field(default_factory=AttackConfig)
    kernel: KernelConfig = field(default_factory=KernelConfig)
    svm: SvmConfig = field(default_factory=SvmConfig)
    eval: EvalConfig = field(default_factory=EvalConfig)
    master_seed: int = 0
    output_dir: str = "out"

    def validate(self):
        if (self.dataset.profile is None) == (self.dataset.csv is None):
            raise ConfigurationError("dataset needs exactly one of 'profile' or 'csv'")
        if self.preprocessing.pca_k != 2 * self.kernel.qubits:
            raise ConfigurationError(
                f"pca_k must be twice the qubit count, got pca_k={self.preprocessing.pca_k} "
                f"with {self.kernel.qubits} qubits"
            )
        if self.preprocessing.window < 1:
            raise ConfigurationError(f"window must be >= 1, got {self.preprocessing.window}")
        if self.attack.kind not in ATTACK_KINDS:
            raise ConfigurationError(f"unknown attack kind {self.attack.kind!r}")
        if self.kernel.estimator not in ("exact", "shots"):
            raise ConfigurationError(f"estimator must be 'exact' or 'shots', got {self.kernel.estimator!r}")
        if self.eval.folds < 2:
            raise ConfigurationError(f"folds must be >= 2, got {self.eval.folds}")
        if not 0 < self.svm.nu <= 1:
            raise ConfigurationError(f"nu must be in (0, 1], got {self.svm.nu}")
        return self

    def to_dict(self) -> dict:
        return asdict(self)


_SECTIONS = {
    "dataset": DatasetConfig,
    "preprocessing": PreprocessingConfig,
    "attack": AttackConfig,
    "kernel": KernelConfig,
    "svm": SvmConfig,
    "eval": EvalConfig,
}


def config_from_dict(doc: dict) -> ExperimentConfig:
    kwargs = {}
    for name, cls in _SECTIONS.items():
        section = doc.get(name, {})
        if not isinstance(section, dict):
            raise ConfigurationError(f"section [{name}] must be a table")
        allowed = set(cls.__dataclass_fields__)
        unknown = set(section) - allowed
        if unknown:
            raise ConfigurationError(f"unknown keys in [{name}]: {sorted(unknown)}")
        kwargs[name] = cls(**section)
    for key in ("master_seed", "output_dir"):
        if key in doc:
            kwargs[key] = doc[key]
    unknown = set(doc) - set(_SECTIONS) - {"master_seed", "output_dir"}
    if unknown:
        raise ConfigurationError(f"unknown top-level config keys: {sorted(unknown)}")
    return ExperimentConfig(**kwargs).validate()


def load_config(path) -> ExperimentConfig:
    with open(path, "rb") as fh:
        doc = tomllib.load(fh)
    return config_from_dict(doc)
