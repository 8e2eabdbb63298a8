"""Ordinary least-squares decoder for the overdetermined regime (m > n).

The 1-bit measurements are treated as if they were linear observations;
the solution then approximates the true signal up to the model's scale
constant, which downstream metrics correct for.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeError
from .linalg import cholesky, gram_submatrix, solve_spd

__all__ = ["LsEstimate", "decode_ls"]


@dataclass(frozen=True)
class LsEstimate:
    """Least-squares solution plus a cheap conditioning diagnostic.

    ``gram_condition`` estimates the condition number of the normalized
    Gram matrix from the extreme diagonal entries of its Cholesky factor;
    it is a diagnostic, not a rigorous bound.
    """

    x_ls: np.ndarray
    gram_condition: float


def decode_ls(problem):
    """Solve min_x ||Psi x - y||_2^2 via normal equations and Cholesky.

    Raises
    ------
    ShapeError
        If the problem is not overdetermined (m <= n).
    SingularGram
        If the sensing matrix is numerically rank-deficient.
    """
    psi, y = problem.psi, problem.y
    m, n = psi.shape
    if m <= n:
        raise ShapeError(f"least-squares decoding needs m > n, got m={m}, n={n}")
    gram = gram_submatrix(psi, np.arange(n))
    factor = cholesky(gram)
    x_ls = solve_spd(factor, psi.T @ y)
    diag = np.diag(factor.lower)
    cond = float((diag.max() / diag.min()) ** 2)
    return LsEstimate(x_ls=x_ls, gram_condition=cond)
