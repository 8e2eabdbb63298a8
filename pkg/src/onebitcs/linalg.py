"""Dense linear-algebra kernels used by the decoders.

Matrices are 2-D float64 ndarrays in row-major (C) order; vectors are 1-D
float64 ndarrays.  Active-set systems are solved by normal equations plus a
Cholesky factorization; no explicit inverses are ever formed.  The kernels
never regularize: a numerically singular Gram matrix raises
:class:`~onebitcs.errors.SingularGram` and the caller decides what to do.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .errors import SingularGram

__all__ = ["CholeskyFactor", "matvec", "gram_submatrix", "cholesky", "solve_spd"]

# Asymmetry beyond this (relative to the largest entry) is a caller bug.
_SYMMETRY_RTOL = 1e-12


def _as_matrix(M, name="M"):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got ndim={M.ndim}")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} contains non-finite entries")
    return M


def _as_vector(v, name="v"):
    v = np.asarray(v, dtype=float)
    if v.ndim != 1:
        raise ValueError(f"{name} must be 1-D, got ndim={v.ndim}")
    return v


@dataclass(frozen=True)
class CholeskyFactor:
    """Lower-triangular factor L with L @ L.T equal to the factored matrix."""

    lower: np.ndarray

    @property
    def dim(self):
        return self.lower.shape[0]


def matvec(M, v):
    """Matrix-vector product M @ v with shape checking."""
    M = _as_matrix(M)
    v = _as_vector(v)
    if v.shape[0] != M.shape[1]:
        raise ValueError(
            f"dimension mismatch: matrix is {M.shape[0]}x{M.shape[1]}, "
            f"vector has length {v.shape[0]}"
        )
    return M @ v


def gram_submatrix(M, cols):
    """Gram matrix of a column subset: M[:, cols].T @ M[:, cols].

    Parameters
    ----------
    M : ndarray (m, n)
    cols : array_like of int
        Nonempty set of column indices in [0, n).

    Returns
    -------
    ndarray (k, k)
        Symmetric Gram matrix of the selected columns.
    """
    M = _as_matrix(M)
    cols = np.asarray(cols, dtype=int)
    if cols.ndim != 1 or cols.size == 0:
        raise ValueError("cols must be a nonempty 1-D index set")
    if np.unique(cols).size != cols.size:
        raise ValueError("cols contains duplicate indices")
    if cols.min() < 0 or cols.max() >= M.shape[1]:
        raise ValueError("cols out of range")
    sub = M[:, cols]
    return sub.T @ sub


def cholesky(G):
    """Cholesky factorization of a symmetric positive-definite matrix.

    A pivot is declared non-positive when it falls at or below
    ``dim * eps * max|G_ii|`` (scaled-pivot criterion), in which case
    :class:`SingularGram` is raised carrying the failing pivot index.
    """
    G = _as_matrix(G, "G")
    k = G.shape[0]
    if G.shape[1] != k:
        raise ValueError(f"G must be square, got {G.shape}")
    asym = np.max(np.abs(G - G.T)) if k else 0.0
    scale = max(1.0, float(np.max(np.abs(G)))) if k else 1.0
    if asym > _SYMMETRY_RTOL * scale:
        raise ValueError(f"G is not symmetric (max asymmetry {asym:.3e})")

    threshold = k * np.finfo(float).eps * float(np.max(np.abs(np.diag(G)))) if k else 0.0
    L = np.array(G, dtype=float, order="C")
    for j in range(k):
        pivot = L[j, j] - L[j, :j] @ L[j, :j]
        if pivot <= threshold:
            raise SingularGram(
                f"non-positive pivot {pivot:.6e} at index {j} "
                f"(threshold {threshold:.6e})",
                pivot_index=j,
                pivot=float(pivot),
            )
        L[j, j] = np.sqrt(pivot)
        if j + 1 < k:
            L[j + 1 :, j] = (L[j + 1 :, j] - L[j + 1 :, :j] @ L[j, :j]) / L[j, j]
            L[j, j + 1 :] = 0.0
    return CholeskyFactor(lower=L)


def solve_spd(factor, b):
    """Solve G @ z = b given the Cholesky factor of G.

    Forward substitution with L then back substitution with L.T.
    """
    b = _as_vector(b, "b")
    if b.shape[0] != factor.dim:
        raise ValueError(
            f"dimension mismatch: factor dim {factor.dim}, b has length {b.shape[0]}"
        )
    if factor.dim == 0:
        return b.copy()
    w = solve_triangular(factor.lower, b, lower=True)
    return solve_triangular(factor.lower, w, lower=True, trans="T")
