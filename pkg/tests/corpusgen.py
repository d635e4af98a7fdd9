"""Deterministic image corpus in the CIFAR-10 binary layout.

The real dataset is not bundled, so tests synthesize a look-alike: six
files with the exact record format (1 label byte + 3072 pixel bytes as
three channel planes), exactly 1,000 records per class per file. Images
are class prototypes (smooth seeded random fields) corrupted by strong
pixel noise and per-image brightness jitter, and a fraction of records
draw their image from another class's prototypes while keeping their
own label. Prototype matching therefore caps train accuracy well below
100%, and further progress requires memorizing individual noisy
records — so small training subsets overfit, like the real thing.

Set CIFAR10_DIR to a directory holding the six canonical .bin files to
run everything against the real dataset instead.
"""

import numpy as np

from lifedrop.data import CIFAR_CLASSES, RECORD_BYTES, RECORDS_PER_FILE, TEST_FILE, TRAIN_FILES

PROTOS_PER_CLASS = 8
CONTRAST = 0.45  # prototype amplitude around mid-gray
NOISE = 0.35  # per-pixel Gaussian noise sigma
JITTER = 0.12  # per-image brightness shift bound
CONFUSED = 0.30  # fraction of records drawn from another class's prototypes
_PER_CLASS_PER_FILE = RECORDS_PER_FILE // CIFAR_CLASSES


def class_prototypes(class_id: int) -> np.ndarray:
    """(PROTOS_PER_CLASS, 3072) float32 prototype images for one class."""
    rng = np.random.default_rng(1_000_003 + class_id)
    low = rng.random((PROTOS_PER_CLASS, 3, 8, 8), dtype=np.float32) * 2.0 - 1.0
    up = np.kron(low, np.ones((1, 1, 4, 4), dtype=np.float32))
    for axis in (2, 3):  # box-smooth so prototypes are not blocky
        up = (np.roll(up, 1, axis=axis) + up + np.roll(up, -1, axis=axis)) / 3.0
    protos = 0.5 + CONTRAST * up
    return protos.reshape(PROTOS_PER_CLASS, -1)


def _write_file(path, file_seed: int, protos: np.ndarray) -> None:
    """One 30,730,000-byte batch file: exactly 1,000 records per class, shuffled."""
    rng = np.random.default_rng(file_seed)
    labels = np.repeat(np.arange(CIFAR_CLASSES), _PER_CLASS_PER_FILE).astype(np.uint8)
    rng.shuffle(labels)
    picks = rng.integers(0, PROTOS_PER_CLASS, size=RECORDS_PER_FILE)
    # a slice of records is visually confusable: the image comes from some
    # other class's prototypes while the label stays put, so driving train
    # accuracy toward 100% requires memorizing individual samples
    image_class = labels.astype(np.int64)
    confused = rng.random(RECORDS_PER_FILE) < CONFUSED
    image_class[confused] = rng.integers(0, CIFAR_CLASSES, size=int(confused.sum()))
    base = protos[image_class, picks]
    jitter = (rng.random((RECORDS_PER_FILE, 1), dtype=np.float32) * 2.0 - 1.0) * JITTER
    noise = rng.standard_normal(base.shape, dtype=np.float32) * NOISE
    img = np.clip(base + jitter + noise, 0.0, 1.0)
    records = np.empty((RECORDS_PER_FILE, RECORD_BYTES), dtype=np.uint8)
    records[:, 0] = labels
    records[:, 1:] = np.round(img * 255.0).astype(np.uint8)
    records.tofile(path)


def generate_corpus(directory) -> None:
    """Write the six batch files; same output every call."""
    protos = np.stack([class_prototypes(c) for c in range(CIFAR_CLASSES)])
    for i, name in enumerate(TRAIN_FILES):
        _write_file(directory / name, file_seed=9_000_000 + i, protos=protos)
    _write_file(directory / TEST_FILE, file_seed=9_000_005, protos=protos)
    # pin two known records for exact normalization-endpoint checks:
    # record 0 of the first file is all-white, record 1 all-black
    with open(directory / TRAIN_FILES[0], "r+b") as fh:
        fh.seek(1)
        fh.write(b"\xff" * (RECORD_BYTES - 1))
        fh.seek(RECORD_BYTES + 1)
        fh.write(b"\x00" * (RECORD_BYTES - 1))
