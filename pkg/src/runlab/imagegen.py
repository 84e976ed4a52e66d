"""Seeded random binary images with controlled density and granularity.

The image is tiled by ``g x g`` blocks. Block ``(by, bx)`` is foreground when

    u = splitmix64(splitmix64(seed) ^ ((by << 32) | bx)) >> 11
    u * 2**-53 < density

where ``splitmix64(x)`` is one step of the SplitMix64 generator started from
state ``x`` (add 0x9E3779B97F4A7C15, then the standard 30/27/31 finalizer).
Every block is drawn from its own counter, so the image does not depend on
traversal order and reproduces bit-for-bit anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import BinaryImage

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_MASK64 = (1 << 64) - 1


def splitmix64(x):
    """SplitMix64 output for state ``x`` (scalar int or uint64 array)."""
    if isinstance(x, (int, np.integer)) and not isinstance(x, np.ndarray):
        z = (int(x) + 0x9E3779B97F4A7C15) & _MASK64
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)
    z = np.asarray(x, dtype=np.uint64) + _GOLDEN
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


@dataclass(frozen=True)
class GeneratorSpec:
    width: int
    height: int
    density: float
    granularity: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("width and height must be positive")
        if not 0.0 <= self.density <= 1.0:
            raise ValueError(f"density {self.density} outside [0, 1]")
        if int(self.granularity) != self.granularity or self.granularity < 1:
            raise ValueError("granularity must be a positive integer")
        if self.granularity > min(self.width, self.height):
            raise ValueError("granularity cannot exceed the image size")
        if not 0 <= self.seed <= _MASK64:
            raise ValueError("seed must fit in 64 unsigned bits")


def block_grid(n_rows: int, n_cols: int, density: float, seed: int) -> np.ndarray:
    """The 0/1 decision for each block of an ``n_rows x n_cols`` block grid."""
    key = np.uint64(splitmix64(seed))
    by = np.arange(n_rows, dtype=np.uint64)[:, None] << np.uint64(32)
    bx = np.arange(n_cols, dtype=np.uint64)[None, :]
    u = splitmix64(key ^ (by | bx)) >> np.uint64(11)
    # exact in float64: u < 2**53
    return (u.astype(np.float64) * 2.0**-53 < density).astype(np.uint8)


def generate(spec: GeneratorSpec) -> BinaryImage:
    g = spec.granularity
    nby = -(-spec.height // g)
    nbx = -(-spec.width // g)
    blocks = block_grid(nby, nbx, spec.density, spec.seed)
    if g > 1:
        blocks = np.repeat(np.repeat(blocks, g, axis=0), g, axis=1)
    return BinaryImage(blocks[: spec.height, : spec.width])
