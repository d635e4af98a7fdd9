"""Dataset ingestion and batching.

Reads the canonical CIFAR-10 binary distribution (six files of 10,000
records; each record is 1 label byte followed by 3072 pixel bytes laid
out as three 1024-byte channel planes, row-major). Pixels are scaled
into [0, 1] by dividing by 255; no other preprocessing. A synthetic
Gaussian-blob generator stands in for fast, offline tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from lifedrop.seeding import derive_seed

RECORD_BYTES = 3073
RECORDS_PER_FILE = 10_000
FILE_BYTES = RECORD_BYTES * RECORDS_PER_FILE  # 30,730,000
TRAIN_FILES = tuple(f"data_batch_{i}.bin" for i in range(1, 6))
TEST_FILE = "test_batch.bin"
FEATURE_DIM = 3072
CIFAR_CLASSES = 10


class CifarFormatError(ValueError):
    """A CIFAR-10 batch file is missing or malformed."""


@dataclass(frozen=True)
class Dataset:
    features: np.ndarray  # (n, dim) float64 in [0, 1]
    labels: np.ndarray  # (n,) int64
    name: str
    class_count: int

    def __post_init__(self):
        features = np.asarray(self.features, dtype=np.float64)
        labels = np.asarray(self.labels, dtype=np.int64)
        if features.ndim != 2:
            raise ValueError(f"features must be 2-D, got shape {features.shape}")
        if labels.ndim != 1 or labels.shape[0] != features.shape[0]:
            raise ValueError(f"{features.shape[0]} feature rows but {labels.shape} labels")
        if self.class_count < 1:
            raise ValueError("class_count must be positive")
        if labels.size and (labels.min() < 0 or labels.max() >= self.class_count):
            raise ValueError(f"labels must lie in [0, {self.class_count})")
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.features.shape[0]


@dataclass(frozen=True)
class BatchPlan:
    batch_size: int
    seed: int

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be positive, got {self.batch_size}")


def _read_batch_file(path: Path) -> tuple[np.ndarray, np.ndarray]:
    if not path.is_file():
        raise CifarFormatError(f"{path}: missing CIFAR-10 batch file")
    raw = np.fromfile(path, dtype=np.uint8)
    if raw.size != FILE_BYTES:
        raise CifarFormatError(f"{path}: expected {FILE_BYTES} bytes, found {raw.size}")
    records = raw.reshape(RECORDS_PER_FILE, RECORD_BYTES)
    labels = records[:, 0]
    bad = np.flatnonzero(labels > 9)
    if bad.size:
        record = int(bad[0])
        raise CifarFormatError(f"{path}: label byte {labels[record]} > 9 at offset {record * RECORD_BYTES}")
    features = records[:, 1:].astype(np.float64) / 255.0
    return features, labels.astype(np.int64)


def load_cifar10(directory) -> tuple[Dataset, Dataset]:
    """Load (train, validation) from the six canonical binary files.

    Train is the 50,000 samples of data_batch_1..5.bin; validation is the
    10,000-sample test_batch.bin (the held-out split all metrics are
    reported on).
    """
    base = Path(directory)
    parts = [_read_batch_file(base / name) for name in TRAIN_FILES]
    train_x = np.concatenate([x for x, _ in parts])
    train_y = np.concatenate([y for _, y in parts])
    val_x, val_y = _read_batch_file(base / TEST_FILE)
    return (Dataset(train_x, train_y, name="cifar10-train", class_count=CIFAR_CLASSES),
            Dataset(val_x, val_y, name="cifar10-validation", class_count=CIFAR_CLASSES))


def one_hot(label: int, class_count: int) -> np.ndarray:
    """Unit basis vector for `label`."""
    if not 0 <= label < class_count:
        raise ValueError(f"label {label} out of range for {class_count} classes")
    vec = np.zeros(class_count)
    vec[label] = 1.0
    return vec


def make_blobs(per_class: int, classes: int, dim: int, separation: float, seed: int) -> Dataset:
    """Axis-aligned Gaussian clusters rescaled into [0, 1].

    Class c is centred `separation` along coordinate axis c with unit
    within-class variance, so `separation` is the between-class distance
    in standard deviations. Rows are shuffled; everything is seeded.
    """
    if per_class < 1 or classes < 1 or dim < 1:
        raise ValueError("per_class, classes, and dim must be positive")
    if separation < 0:
        raise ValueError(f"separation must be non-negative, got {separation}")
    if dim < classes:
        raise ValueError(f"dim ({dim}) must be at least classes ({classes}) for axis-aligned means")
    rng = np.random.default_rng(seed)
    means = np.zeros((classes, dim))
    means[np.arange(classes), np.arange(classes)] = separation
    features = np.vstack([rng.normal(means[c], 1.0, size=(per_class, dim)) for c in range(classes)])
    labels = np.repeat(np.arange(classes), per_class)
    order = rng.permutation(classes * per_class)
    features, labels = features[order], labels[order]
    lo = features.min(axis=0)
    span = features.max(axis=0) - lo
    span[span == 0] = 1.0
    features = np.clip((features - lo) / span, 0.0, 1.0)
    return Dataset(features, labels, name=f"blobs-{classes}x{per_class}", class_count=classes)


def batches(dataset: Dataset, plan: BatchPlan, epoch: int):
    """Yield (features, one-hot labels) covering every sample exactly once.

    The order is a fresh permutation that is a pure function of
    (plan.seed, epoch); the last batch may be short.
    """
    rng = np.random.default_rng(derive_seed(plan.seed, "shuffle", epoch))
    order = rng.permutation(dataset.n)
    eye = np.eye(dataset.class_count)
    for start in range(0, dataset.n, plan.batch_size):
        idx = order[start:start + plan.batch_size]
        yield dataset.features[idx], eye[dataset.labels[idx]]
