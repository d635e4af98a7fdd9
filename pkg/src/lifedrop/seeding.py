"""Deterministic child-seed derivation.

Every random stream in a run (weight init, batch shuffling, per-batch
dropout noise, lattice init, reactivation events) is derived from the
master seed plus a readable stream key, so identical configs reproduce
bit-identical runs without the streams aliasing each other.
"""

from __future__ import annotations

import numpy as np


def derive_seed(master: int, *key) -> int:
    """Stable child seed for (master, key); key parts are strings or ints."""
    parts: list[int] = []
    for item in key:
        if isinstance(item, str):
            parts.extend(item.encode())
        else:
            parts.append(int(item) & 0xFFFFFFFF)
    ss = np.random.SeedSequence(entropy=int(master) & 0xFFFFFFFFFFFFFFFF, spawn_key=tuple(parts))
    return int(ss.generate_state(1, dtype=np.uint64)[0])
