"""Reproducible counter-based random streams.

Every sampling entry point takes an explicit generator; experiments
derive independent child streams from (seed, path indices) so that runs
are reproducible regardless of sample ordering or parallel scheduling.
"""

from __future__ import annotations

import numpy as np


def stream(seed: int, *path: int) -> np.random.Generator:
    """Philox stream for a seed and an optional index path."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=tuple(path))
    return np.random.Generator(np.random.Philox(ss))
