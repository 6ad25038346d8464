"""Random utilities for deterministic generation."""

from typing import List, Optional, Sequence, Tuple, TypeVar

import numpy as np

T = TypeVar('T')


class SeededRandom:
    """Seeded random generator for deterministic output."""

    def __init__(self, seed: Optional[int] = None):
        """Initialize with optional seed.

        Args:
            seed: Random seed for deterministic generation
        """
        self.seed = seed
        self.rng = np.random.default_rng(seed)

    def randint(self, a: int, b: int) -> int:
        """Generate random integer between a and b inclusive."""
        return int(self.rng.integers(a, b + 1))

    def normal(self, size: Tuple[int, ...], scale: float = 1.0) -> np.ndarray:
        """Draw an array of zero-mean Gaussian samples."""
        return self.rng.normal(0.0, scale, size=size)

    def orthonormal(self, rows: int, cols: int) -> np.ndarray:
        """Draw a rows x cols matrix with orthonormal columns (rows >= cols)."""
        q, r = np.linalg.qr(self.rng.normal(size=(rows, rows)))
        q = q * np.sign(np.diag(r))
        return q[:, :cols]

    def sample(self, seq: Sequence[T], k: int) -> List[T]:
        """Choose k random elements without replacement, in draw order."""
        picks = self.rng.choice(len(seq), size=k, replace=False)
        return [seq[int(i)] for i in picks]

    def permutation(self, n: int) -> np.ndarray:
        """Random permutation of range(n)."""
        return self.rng.permutation(n)
