"""Experiment driver.

Wires data, network, and regularizer into the training loop, records
per-epoch metrics (losses, accuracies, generalization gap, live-mask
fraction, reactivated cells), writes lattice snapshots and a rerunnable
manifest, and summarizes finished runs. A run is a deterministic
function of its config: identical configs produce byte-identical
metrics files and snapshots.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from lifedrop import nn
from lifedrop.data import BatchPlan, Dataset, batches, load_cifar10, make_blobs
from lifedrop.lattice import init_random, live_fraction, write_pbm
from lifedrop.regularizers import (OverfitMonitor, RegularizerConfig, alpha_affine, classical_gain,
                                   gaussian_gain, mask_for_epoch_dynamic, on_epoch_end_dynamic)
from lifedrop.seeding import derive_seed

ARCH_PRESETS = {
    "arch1": (512, 512, 512),
    "arch2": (128,) * 10,
    "arch3": (64,) * 10,
}

METRICS_HEADER = "epoch,train_loss,val_loss,train_acc,val_acc,gap,live_mask_fraction,reactivated_cells"
SUMMARY_HEADER = "run,regularizer,final_train_loss,final_val_loss,final_train_acc,final_val_acc,max_val_acc,final_gap"


class ConfigError(ValueError):
    """Bad run configuration (unknown preset, missing data source, ...)."""


@dataclass(frozen=True)
class BlobSpec:
    """Parameters for the synthetic-blob data source."""

    per_class: int = 500
    classes: int = 4
    dim: int = 32
    separation: float = 10.0


@dataclass(frozen=True)
class RunConfig:
    architecture: str | tuple[int, ...]  # preset name, "custom:w1,w2,...", or explicit widths
    regularizer: RegularizerConfig
    output_dir: str | Path
    epochs: int = 100
    batch_size: int = 512
    learning_rate: float = 0.01
    seed: int = 0
    snapshot_epochs: tuple[int, ...] = (1, 10, 20)
    patience: int = 5
    min_delta: float = 1e-3
    data_dir: str | None = None
    blobs: BlobSpec | None = None


@dataclass(frozen=True)
class EpochMetrics:
    epoch: int
    train_loss: float
    val_loss: float
    train_acc: float
    val_acc: float
    gap: float  # train_acc - val_acc
    live_mask_fraction: float  # lattice live fraction during this epoch (dynamic only)
    reactivated_cells: int


def resolve_architecture(arch) -> tuple[int, ...]:
    """Preset name, custom:<w1,w2,...> string, or explicit width sequence."""
    if isinstance(arch, str):
        if arch in ARCH_PRESETS:
            return ARCH_PRESETS[arch]
        if arch.startswith("custom:"):
            body = arch[len("custom:"):]
            try:
                widths = tuple(int(w) for w in body.split(","))
            except ValueError:
                raise ConfigError(f"cannot parse custom architecture {arch!r}") from None
        else:
            raise ConfigError(f"unknown architecture preset {arch!r} "
                              f"(expected one of {sorted(ARCH_PRESETS)} or custom:<w1,w2,...>)")
    else:
        widths = tuple(int(w) for w in arch)
    if not widths or any(w < 1 for w in widths):
        raise ConfigError(f"layer widths must be positive, got {widths}")
    return widths


def _architecture_label(arch) -> str:
    if isinstance(arch, str):
        return arch
    return "custom:" + ",".join(str(int(w)) for w in arch)


def evaluate(network: nn.Network, dataset: Dataset, chunk: int = 4096) -> tuple[float, float]:
    """Full-dataset loss and accuracy with every regularizer disabled."""
    if dataset.features.shape[1] != network.input_dim:
        raise ValueError(f"dataset dimension {dataset.features.shape[1]} does not match "
                         f"network input {network.input_dim}")
    if dataset.class_count != network.class_count:
        raise ValueError(f"dataset has {dataset.class_count} classes, network {network.class_count}")
    eye = np.eye(dataset.class_count)
    loss_sum = 0.0
    hits = 0
    for start in range(0, dataset.n, chunk):
        x = dataset.features[start:start + chunk]
        y = dataset.labels[start:start + chunk]
        probs, _ = nn.forward(network, x)
        loss_sum += nn.cross_entropy(eye[y], probs) * x.shape[0]
        hits += int((probs.argmax(axis=1) == y).sum())
    return loss_sum / dataset.n, hits / dataset.n


def _load_data(config: RunConfig) -> tuple[Dataset, Dataset]:
    if config.data_dir is not None:
        return load_cifar10(config.data_dir)
    if config.blobs is not None:
        b = config.blobs
        train = make_blobs(b.per_class, b.classes, b.dim, b.separation,
                           seed=derive_seed(config.seed, "blobs", 0))
        val = make_blobs(max(1, b.per_class // 5), b.classes, b.dim, b.separation,
                         seed=derive_seed(config.seed, "blobs", 1))
        return train, val
    raise ConfigError("no data source configured: set data_dir or blobs, or inject datasets")


def _batch_scales(network: nn.Network, reg: RegularizerConfig, batch_n: int, epoch: int, batch_i: int):
    """Fresh per-batch (gain, offset) noise for every hidden layer."""
    scales = []
    for l, layer in enumerate(network.hidden_layers):
        shape = (batch_n, layer.fan_out)
        seed = derive_seed(reg.seed, "noise", epoch, batch_i, l)
        if reg.kind == "classical":
            scales.append((classical_gain(shape, reg.rate, seed), None))
        elif reg.kind == "gaussian":
            scales.append((gaussian_gain(shape, reg.rate, seed), None))
        else:
            scales.append(alpha_affine(shape, reg.rate, seed))
    return scales


def run(config: RunConfig, data: tuple[Dataset, Dataset] | None = None) -> list[EpochMetrics]:
    """Train per the config and return one metrics record per epoch.

    Each epoch iterates seeded mini-batches (the dynamic mask is fixed
    for the epoch; baselines draw fresh noise per batch), then measures
    loss and accuracy over the full train and validation sets in
    evaluation mode, and finally runs the dynamic epoch-end hook (monitor
    -> reactivate -> lattice step). `data` optionally injects preloaded
    (train, validation) datasets in place of config.data_dir/config.blobs.
    """
    widths = resolve_architecture(config.architecture)
    if config.epochs < 0:
        raise ConfigError(f"epochs must be non-negative, got {config.epochs}")
    if config.batch_size < 1:
        raise ConfigError(f"batch_size must be positive, got {config.batch_size}")
    if config.learning_rate <= 0:
        raise ConfigError(f"learning_rate must be positive, got {config.learning_rate}")
    reg = config.regularizer

    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_manifest(config, out / "manifest.txt")
    if config.epochs == 0:
        return []

    train_ds, val_ds = data if data is not None else _load_data(config)
    network = nn.init_network(list(widths), train_ds.features.shape[1], train_ds.class_count,
                              seed=derive_seed(config.seed, "init"))

    lattice = None
    monitor = None
    if reg.kind == "dynamic":
        if len(set(widths)) != 1:
            raise ConfigError("dynamic regularizer needs uniform hidden widths "
                              f"(the lattice is rectangular), got {widths}")
        lattice = init_random(len(widths), widths[0], reg.lattice_density,
                              seed=derive_seed(config.seed, "lattice"))
        monitor = OverfitMonitor(patience=config.patience, min_delta=config.min_delta)

    plan = BatchPlan(batch_size=config.batch_size, seed=derive_seed(config.seed, "batches"))
    history: list[EpochMetrics] = []
    for epoch in range(1, config.epochs + 1):
        masks = None
        live_frac = 0.0
        if lattice is not None:
            masks = [mask_for_epoch_dynamic(lattice, l) for l in range(lattice.rows)]
            live_frac = live_fraction(lattice)
            if epoch in config.snapshot_epochs:
                write_pbm(lattice, out / f"lattice_epoch_{epoch}.pbm")

        for batch_i, (x, y) in enumerate(batches(train_ds, plan, epoch)):
            scales = None
            if reg.kind in ("classical", "gaussian", "alpha"):
                scales = _batch_scales(network, reg, x.shape[0], epoch, batch_i)
            _, trace = nn.forward(network, x, masks=masks, scales=scales)
            grads = nn.backward(network, trace, y)
            network = nn.sgd_step(network, grads, config.learning_rate)

        train_loss, train_acc = evaluate(network, train_ds)
        val_loss, val_acc = evaluate(network, val_ds)
        reactivated = 0
        if lattice is not None:
            lattice, monitor, _, reactivated = on_epoch_end_dynamic(lattice, monitor, val_loss, reg)
        history.append(EpochMetrics(epoch=epoch, train_loss=train_loss, val_loss=val_loss,
                                    train_acc=train_acc, val_acc=val_acc,
                                    gap=train_acc - val_acc, live_mask_fraction=live_frac,
                                    reactivated_cells=reactivated))
    write_metrics(history, out / "metrics.csv")
    return history


def write_metrics(history, path) -> None:
    """CSV with one row per epoch, reals at fixed 6-decimal precision."""
    lines = [METRICS_HEADER]
    for m in history:
        lines.append(f"{m.epoch},{m.train_loss:.6f},{m.val_loss:.6f},{m.train_acc:.6f},"
                     f"{m.val_acc:.6f},{m.gap:.6f},{m.live_mask_fraction:.6f},{m.reactivated_cells}")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_metrics(path) -> list[EpochMetrics]:
    path = Path(path)
    if not path.is_file():
        raise ValueError(f"{path}: missing metrics file")
    lines = path.read_text().splitlines()
    if not lines or lines[0] != METRICS_HEADER:
        raise ValueError(f"{path}: malformed metrics header")
    history = []
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.split(",")
        if len(fields) != 8:
            raise ValueError(f"{path}:{lineno}: expected 8 fields, got {len(fields)}")
        history.append(EpochMetrics(epoch=int(fields[0]), train_loss=float(fields[1]),
                                    val_loss=float(fields[2]), train_acc=float(fields[3]),
                                    val_acc=float(fields[4]), gap=float(fields[5]),
                                    live_mask_fraction=float(fields[6]),
                                    reactivated_cells=int(fields[7])))
    return history


def write_manifest(config: RunConfig, path) -> None:
    """Key = value dump of everything needed to rerun the experiment."""
    widths = resolve_architecture(config.architecture)
    reg = config.regularizer
    if config.data_dir is not None:
        data = f"dir:{config.data_dir}"
    elif config.blobs is not None:
        b = config.blobs
        data = f"blobs:per_class={b.per_class},classes={b.classes},dim={b.dim},separation={b.separation!r}"
    else:
        data = "injected"
    lines = [
        f"arch = {_architecture_label(config.architecture)}",
        f"layers = {','.join(str(w) for w in widths)}",
        f"regularizer = {reg.kind}",
        f"rate = {reg.rate!r}",
        f"lattice_density = {reg.lattice_density!r}",
        f"reactivation_fraction = {reg.reactivation_fraction!r}",
        f"reg_seed = {reg.seed}",
        f"patience = {config.patience}",
        f"min_delta = {config.min_delta!r}",
        f"epochs = {config.epochs}",
        f"batch_size = {config.batch_size}",
        f"learning_rate = {config.learning_rate!r}",
        f"seed = {config.seed}",
        f"snapshot_epochs = {','.join(str(e) for e in config.snapshot_epochs)}",
        f"data = {data}",
    ]
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def config_from_manifest(path, output_dir) -> RunConfig:
    """Rebuild a RunConfig from a manifest written by write_manifest."""
    path = Path(path)
    entries = {}
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        if not line.strip():
            continue
        key, sep, value = line.partition(" = ")
        if not sep:
            raise ValueError(f"{path}:{lineno}: malformed manifest line {line!r}")
        entries[key] = value
    try:
        reg = RegularizerConfig(kind=entries["regularizer"], rate=float(entries["rate"]),
                                lattice_density=float(entries["lattice_density"]),
                                reactivation_fraction=float(entries["reactivation_fraction"]),
                                seed=int(entries["reg_seed"]))
        data_dir = None
        blobs = None
        data = entries["data"]
        if data.startswith("dir:"):
            data_dir = data[len("dir:"):]
        elif data.startswith("blobs:"):
            fields = dict(part.split("=") for part in data[len("blobs:"):].split(","))
            blobs = BlobSpec(per_class=int(fields["per_class"]), classes=int(fields["classes"]),
                             dim=int(fields["dim"]), separation=float(fields["separation"]))
        snapshot = tuple(int(e) for e in entries["snapshot_epochs"].split(",")) \
            if entries["snapshot_epochs"] else ()
        return RunConfig(architecture=entries["arch"], regularizer=reg, output_dir=output_dir,
                         epochs=int(entries["epochs"]), batch_size=int(entries["batch_size"]),
                         learning_rate=float(entries["learning_rate"]), seed=int(entries["seed"]),
                         snapshot_epochs=snapshot, patience=int(entries["patience"]),
                         min_delta=float(entries["min_delta"]), data_dir=data_dir, blobs=blobs)
    except KeyError as exc:
        raise ValueError(f"{path}: manifest is missing key {exc}") from None


def _read_manifest_entries(path) -> dict[str, str]:
    path = Path(path)
    if not path.is_file():
        raise ValueError(f"{path}: missing manifest file")
    entries = {}
    for line in path.read_text().splitlines():
        key, sep, value = line.partition(" = ")
        if sep:
            entries[key] = value
    return entries


def compare(run_dirs, out_path="summary.csv"):
    """Summarize finished runs into one CSV row each.

    Per run: final train/val accuracy and loss, best validation accuracy
    over all epochs, and the final generalization gap. Returns the rows
    and writes them to out_path.
    """
    rows = []
    for run_dir in run_dirs:
        run_dir = Path(run_dir)
        history = read_metrics(run_dir / "metrics.csv")
        if not history:
            raise ValueError(f"{run_dir}: metrics.csv has no epoch rows")
        manifest = _read_manifest_entries(run_dir / "manifest.txt")
        kind = manifest.get("regularizer", "?")
        last = history[-1]
        rows.append((run_dir.name, kind, last.train_loss, last.val_loss,
                     last.train_acc, last.val_acc,
                     max(m.val_acc for m in history), last.gap))
    lines = [SUMMARY_HEADER]
    for name, kind, tl, vl, ta, va, best_va, gap in rows:
        lines.append(f"{name},{kind},{tl:.6f},{vl:.6f},{ta:.6f},{va:.6f},{best_va:.6f},{gap:.6f}")
    text = "\n".join(lines) + "\n"
    if out_path is not None:
        with open(out_path, "w", newline="\n") as fh:
            fh.write(text)
    return rows
