"""Proximal-gradient reference solver for the l1-regularized objective.

Deliberately simple and slow: plain ISTA with backtracking, run to a tight
fixed-point tolerance.  It shares no code path with the active-set solver,
so agreement between the two certifies both.  Used in tests and in the
harness's certification mode, never as the production decoder.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MaxIterExceeded
from .pdas import soft_threshold

__all__ = ["OracleResult", "objective", "ista_solve"]

_POWER_ITERATIONS = 20


@dataclass(frozen=True)
class OracleResult:
    """Reference minimizer with its objective and fixed-point residual."""

    x: np.ndarray
    objective: float
    iterations: int
    grad_map_norm: float


def objective(problem, x, lam):
    """Value of  1/(2m) ||y - Psi x||_2^2 + lam ||x||_1."""
    x = np.asarray(x, dtype=float)
    if x.shape[0] != problem.psi.shape[1]:
        raise ValueError(
            f"x has length {x.shape[0]}, expected {problem.psi.shape[1]}"
        )
    r = problem.y - problem.psi @ x
    return float(r @ r / (2.0 * problem.psi.shape[0]) + lam * np.abs(x).sum())


def _lipschitz_estimate(psi):
    """Largest eigenvalue of Psi.T Psi / m by a fixed number of power steps."""
    m, n = psi.shape
    v = np.ones(n) / np.sqrt(n)
    lip = 1.0
    for _ in range(_POWER_ITERATIONS):
        w = psi.T @ (psi @ v) / m
        lip = float(np.linalg.norm(w))
        if lip == 0.0:
            return 1.0
        v = w / lip
    return lip


def ista_solve(problem, lam, tol=1e-10, max_iter=200_000):
    """Minimize the l1-regularized least-squares objective by ISTA.

    Iterates ``x <- S_{lam*t}(x - t * grad f(x))`` with backtracking on the
    step ``t`` and stops when the fixed-point residual
    ``max|x_next - x| / t`` drops to ``tol``.

    Raises
    ------
    MaxIterExceeded
        If the residual is still above ``tol`` after ``max_iter`` accepted
        steps; the exception carries the last residual.
    """
    if lam <= 0:
        raise ValueError(f"lam must be > 0, got {lam}")
    if tol <= 0:
        raise ValueError(f"tol must be > 0, got {tol}")
    psi, y = problem.psi, problem.y
    m, n = psi.shape

    step = 1.0 / _lipschitz_estimate(psi)
    x = np.zeros(n)
    r = y - psi @ x
    f_val = float(r @ r) / (2.0 * m)
    residual = np.inf

    for it in range(1, max_iter + 1):
        grad = -(psi.T @ r) / m
        while True:
            cand = soft_threshold(x - step * grad, lam * step)
            delta = cand - x
            r_cand = y - psi @ cand
            f_cand = float(r_cand @ r_cand) / (2.0 * m)
            if f_cand <= f_val + grad @ delta + delta @ delta / (2.0 * step):
                break
            step *= 0.5
        residual = float(np.max(np.abs(delta))) / step
        x, r, f_val = cand, r_cand, f_cand
        if residual <= tol:
            return OracleResult(
                x=x,
                objective=objective(problem, x, lam),
                iterations=it,
                grad_map_norm=residual,
            )
    raise MaxIterExceeded(
        f"ISTA did not reach tol={tol:.3e} in {max_iter} iterations "
        f"(last residual {residual:.3e})",
        residual=residual,
    )
