"""Small numerical helpers shared across modules."""

from typing import Union

import numpy as np

ArrayLike = Union[float, np.ndarray]


def softplus(z: ArrayLike) -> ArrayLike:
    """Overflow-safe log(1 + e^z), computed as max(z, 0) + log1p(e^-|z|)."""
    z = np.asarray(z, dtype=float)
    out = np.maximum(z, 0.0) + np.log1p(np.exp(-np.abs(z)))
    return float(out) if out.ndim == 0 else out


def symmetrize(a: np.ndarray) -> np.ndarray:
    """Return (A + A^T) / 2."""
    return 0.5 * (a + a.T)


def quadratic_forms(x: np.ndarray, m: np.ndarray) -> np.ndarray:
    """Row-wise x_r^T M x_r for a stack of row vectors."""
    return np.einsum("ij,jk,ik->i", x, m, x)


def pairwise_mahalanobis(x: np.ndarray, y: np.ndarray, m: np.ndarray) -> np.ndarray:
    """All-pairs (x_i - y_j)^T M (x_i - y_j), clamped at zero."""
    xm = x @ m
    dist = (
        np.einsum("ij,ij->i", xm, x)[:, None]
        + quadratic_forms(y, m)[None, :]
        - 2.0 * xm @ y.T
    )
    return np.maximum(dist, 0.0)
