"""Reproducible random streams for simulations.

All stochastic components draw from the counter-based Philox 4x64 generator.
A stream is identified by (seed, stream) where both are 64-bit integers used
directly as the Philox key, so streams are independent by construction,
splittable without coordination, and bit-reproducible across platforms and
process/thread layouts.
"""

from __future__ import annotations

import numpy as np

__all__ = ["stream_generator"]


def stream_generator(seed: int, stream: int = 0) -> np.random.Generator:
    """Generator for the Philox stream keyed by (seed, stream)."""
    key = np.array([np.uint64(seed & 0xFFFFFFFFFFFFFFFF),
                    np.uint64(stream & 0xFFFFFFFFFFFFFFFF)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))
