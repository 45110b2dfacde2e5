"""Seed splitting for reproducible substreams.

Every stochastic component draws from its own substream derived from
``(seed, label, index)``. Adding a replication or a new component never
perturbs existing streams, because each (label, index) pair maps to an
independent SeedSequence.
"""

from __future__ import annotations

import hashlib

import numpy as np


def _label_key(label: str) -> int:
    # Stable across processes; hash() is salted so it cannot be used here.
    digest = hashlib.sha256(label.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def substream(seed: int, label: str, index: int = 0) -> np.random.Generator:
    """Return the generator for substream (seed, label, index)."""
    return np.random.default_rng(
        np.random.SeedSequence(entropy=[int(seed), _label_key(label), int(index)])
    )
