"""The four dropout strategies behind one config, plus the stagnation monitor.

Classical, Gaussian and alpha dropout draw fresh noise per batch; the
dynamic variant reads its per-layer masks off the Game-of-Life lattice,
which advances one generation per epoch. All four are the identity in
evaluation mode. Noise is applied at the same site as the dynamic mask
(the pre-activations), so the comparison between strategies is
site-controlled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from lifedrop.lattice import Lattice, layer_mask, reactivate, step
from lifedrop.seeding import derive_seed

KINDS = ("none", "classical", "gaussian", "alpha", "dynamic")

# Negative saturation value for alpha dropout: dropped units are pinned here
# instead of zero so an affine correction can restore mean 0 / variance 1.
ALPHA_PRIME = -1.7580993408473766


@dataclass(frozen=True)
class RegularizerConfig:
    kind: str
    rate: float = 0.5
    lattice_density: float = 0.5
    reactivation_fraction: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown regularizer kind {self.kind!r}, expected one of {KINDS}")
        if not 0.0 <= self.rate < 1.0:
            raise ValueError(f"rate must lie in [0, 1), got {self.rate}")
        if not 0.0 <= self.lattice_density <= 1.0:
            raise ValueError(f"lattice_density must lie in [0, 1], got {self.lattice_density}")
        if not 0.0 < self.reactivation_fraction <= 1.0:
            raise ValueError(f"reactivation_fraction must lie in (0, 1], got {self.reactivation_fraction}")


@dataclass(frozen=True)
class OverfitMonitor:
    """Patience counter over validation loss; fires when progress stalls."""

    patience: int = 5
    min_delta: float = 1e-3
    best_val_loss: float = math.inf
    epochs_since_improvement: int = 0

    def __post_init__(self):
        if self.patience < 1:
            raise ValueError(f"patience must be at least 1, got {self.patience}")
        if self.min_delta < 0:
            raise ValueError(f"min_delta must be non-negative, got {self.min_delta}")


def monitor_update(monitor: OverfitMonitor, val_loss: float) -> tuple[OverfitMonitor, bool]:
    """Feed one validation loss.

    Improvement by more than min_delta resets the counter; otherwise it
    grows, and reaching patience triggers (and re-arms the counter).
    """
    if math.isnan(val_loss):
        raise ValueError("validation loss is NaN")
    if val_loss < monitor.best_val_loss - monitor.min_delta:
        return replace(monitor, best_val_loss=val_loss, epochs_since_improvement=0), False
    stalled = monitor.epochs_since_improvement + 1
    if stalled >= monitor.patience:
        return replace(monitor, epochs_since_improvement=0), True
    return replace(monitor, epochs_since_improvement=stalled), False


def mask_for_epoch_dynamic(lattice: Lattice, layer_index: int, training: bool = True) -> np.ndarray:
    """Drop mask for one hidden layer; evaluation always gets the zero mask."""
    if not training:
        return np.zeros(lattice.cols)
    return layer_mask(lattice, layer_index)


def _check_rate(rate: float) -> None:
    if not 0.0 <= rate < 1.0:
        raise ValueError(f"rate must lie in [0, 1), got {rate}")


def classical_gain(shape, rate: float, seed: int) -> np.ndarray:
    """Per-element factor: 0 with probability rate, else 1/(1-rate)."""
    _check_rate(rate)
    if rate == 0.0:
        return np.ones(shape)
    rng = np.random.default_rng(seed)
    keep = rng.random(shape) >= rate
    return keep / (1.0 - rate)


def gaussian_gain(shape, rate: float, seed: int) -> np.ndarray:
    """Per-element multiplier ~ Normal(1, rate/(1-rate))."""
    _check_rate(rate)
    if rate == 0.0:
        return np.ones(shape)
    rng = np.random.default_rng(seed)
    return rng.normal(1.0, math.sqrt(rate / (1.0 - rate)), size=shape)


def alpha_affine(shape, rate: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """(gain, offset) such that gain*x + offset is alpha dropout.

    Units are kept with probability p = 1-rate or pinned to ALPHA_PRIME,
    then affine-corrected with a = (p + ALPHA_PRIME^2 * p * (1-p))^-0.5 and
    b = -a * (1-p) * ALPHA_PRIME, which preserves zero mean and unit
    variance of standard-normal input.
    """
    _check_rate(rate)
    if rate == 0.0:
        return np.ones(shape), np.zeros(shape)
    p = 1.0 - rate
    a = (p + ALPHA_PRIME**2 * p * (1.0 - p)) ** -0.5
    b = -a * (1.0 - p) * ALPHA_PRIME
    rng = np.random.default_rng(seed)
    keep = (rng.random(shape) < p).astype(np.float64)
    gain = a * keep
    offset = a * ALPHA_PRIME * (1.0 - keep) + b
    return gain, offset


def apply_classical(z: np.ndarray, rate: float, seed: int, training: bool) -> np.ndarray:
    """Inverted dropout: zero units at `rate`, scale survivors by 1/(1-rate)."""
    _check_rate(rate)
    z = np.asarray(z, dtype=np.float64)
    if not training or rate == 0.0:
        return z
    return z * classical_gain(z.shape, rate, seed)


def apply_gaussian(z: np.ndarray, rate: float, seed: int, training: bool) -> np.ndarray:
    """Multiplicative Gaussian noise with variance rate/(1-rate)."""
    _check_rate(rate)
    z = np.asarray(z, dtype=np.float64)
    if not training or rate == 0.0:
        return z
    return z * gaussian_gain(z.shape, rate, seed)


def apply_alpha(z: np.ndarray, rate: float, seed: int, training: bool) -> np.ndarray:
    """Alpha dropout: keeps input statistics of standard-normal activations."""
    _check_rate(rate)
    z = np.asarray(z, dtype=np.float64)
    if not training or rate == 0.0:
        return z
    gain, offset = alpha_affine(z.shape, rate, seed)
    return z * gain + offset


def on_epoch_end_dynamic(lattice: Lattice, monitor: OverfitMonitor, val_loss: float,
                         config: RegularizerConfig):
    """End-of-epoch hook for the dynamic regularizer.

    Order is fixed: update the monitor; if it fired, revive
    ceil(reactivation_fraction * dead_count) cells so the fresh cells take
    part in the next generation; then advance the lattice one step.

    Returns (next_lattice, next_monitor, triggered, cells_revived).
    """
    next_monitor, triggered = monitor_update(monitor, val_loss)
    revived = 0
    if triggered:
        dead = lattice.size - lattice.live_count
        quota = math.ceil(config.reactivation_fraction * dead)
        before = lattice.live_count
        lattice = reactivate(lattice, quota, derive_seed(config.seed, "reactivate", lattice.epoch))
        revived = lattice.live_count - before
    return step(lattice), next_monitor, triggered, revived
