"""Named, seeded random streams for reproducible simulation.

A stream is identified by (seed, label). The label is hashed into the seed
sequence so every purpose ("client-3-data", "train-1", "model-init") draws
from its own independent generator. The bit generator is pinned to PCG64.
"""

import numpy as np

from src.errors import ConfigError
from src.utils import hash_text

UNIT_LO = np.finfo(np.float64).tiny
UNIT_HI = 1.0 - 2.0**-53


def _entropy(seed: int, label: str) -> list[int]:
    digest = hash_text(label)
    words = [int(digest[i : i + 8], 16) for i in range(0, 64, 8)]
    return [seed & 0xFFFFFFFF, (seed >> 32) & 0xFFFFFFFF, *words]


class RngStream:
    """Seeded generator owned by a single consumer. Clone with child(), never share."""

    def __init__(self, seed: int, label: str):
        if seed < 0 or seed >= 2**64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self._seed = int(seed)
        self._label = label
        self._gen = np.random.Generator(np.random.PCG64(np.random.SeedSequence(_entropy(self._seed, label))))

    @property
    def seed(self) -> int:
        return self._seed

    @property
    def label(self) -> str:
        return self._label

    def child(self, suffix: str) -> "RngStream":
        """Fresh stream for a sub-task; does not consume from this one."""
        return RngStream(self._seed, f"{self._label}/{suffix}")

    def unit(self, n: int) -> np.ndarray:
        """n uniform draws strictly inside (0, 1)."""
        return np.clip(self._gen.random(n), UNIT_LO, UNIT_HI)

    def uniform(self, low: float, high: float, size) -> np.ndarray:
        return self._gen.uniform(low, high, size)

    def permutation(self, n: int) -> np.ndarray:
        return self._gen.permutation(n)

    def __repr__(self) -> str:
        return f"RngStream(seed={self._seed}, label={self._label!r})"
