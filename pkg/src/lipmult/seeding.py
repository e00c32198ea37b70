"""Deterministic seed derivation: one master seed, labelled sub-streams."""

from __future__ import annotations

import hashlib

import numpy as np


def derive_seed(master: int, label: str) -> int:
    """64-bit sub-seed from a master seed and a label (blake2b hash)."""
    h = hashlib.blake2b(f"{int(master)}:{label}".encode(), digest_size=8)
    return int.from_bytes(h.digest(), "little")


def rng_for(master: int, label: str) -> np.random.Generator:
    return np.random.default_rng(derive_seed(master, label))
