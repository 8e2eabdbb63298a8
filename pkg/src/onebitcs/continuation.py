"""Continuation over a geometric grid of regularization parameters.

Starting from ``lambda_0 = ||Psi.T y / m||_inf`` (where zero is optimal),
each grid point ``lambda_t = lambda_0 rho^t`` is solved with the active-set
Newton method warm-started from the previous solution, until the solution's
support outgrows ``floor(m / ln n)`` or the grid is exhausted.  The final
regularization parameter is then chosen by voting: the support size that
persists over the most grid points wins, and the largest of its lambdas is
selected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ActiveSetOverflow, EmptyPath, SingularGram
from .linalg import cholesky, solve_spd
from .pdas import pdas_solve

__all__ = [
    "PathPoint",
    "SolutionPath",
    "Selection",
    "support_cap",
    "run_path",
    "select_lambda",
    "decode_l1",
    "write_path_csv",
]

DEFAULT_RHO = 0.95
DEFAULT_MAX_GRID = 200
DEFAULT_MAX_ITER = 1


@dataclass(frozen=True)
class PathPoint:
    """Solution at one grid point (``skipped`` marks a failed solve)."""

    lam: float
    x: np.ndarray
    support_size: int
    converged: bool
    kkt_residual: float
    skipped: bool = False


@dataclass(frozen=True)
class SolutionPath:
    """Ordered solves along the geometric grid; points[i] sits at
    ``lambda0 * rho**(i + 1)``."""

    lambda0: float
    rho: float
    points: list[PathPoint] = field(default_factory=list)
    cap: int = 0


@dataclass(frozen=True)
class Selection:
    """Voting outcome: chosen lambda, winning support size, vote counts."""

    lambda_hat: float
    ell_bar: int
    votes: dict[int, int]


def support_cap(m, n):
    """Largest admissible support size, floor(m / ln n)."""
    if n < 2:
        raise ValueError(f"need n >= 2 for the support cap, got n={n}")
    return int(m / math.log(n))


def run_path(problem, rho=DEFAULT_RHO, max_grid=DEFAULT_MAX_GRID, max_iter=DEFAULT_MAX_ITER):
    """Solve along the geometric grid with warm starts.

    A grid point whose solve hits a singular active-set Gram is recorded
    with ``skipped=True`` and does not advance the warm start.  An
    active-set overflow (more active entries than measurements) ends the
    path, since every smaller lambda is hopeless.
    """
    if not 0.0 < rho < 1.0:
        raise ValueError(f"rho must be in (0, 1), got {rho}")
    if max_grid < 1:
        raise ValueError(f"max_grid must be >= 1, got {max_grid}")
    psi, y = problem.psi, problem.y
    m, n = psi.shape
    cap = support_cap(m, n)

    lambda0 = float(np.max(np.abs(psi.T @ y / m)))
    if lambda0 <= 0.0:
        raise EmptyPath("Psi.T y vanishes; every lambda yields the zero solution")

    warm = np.zeros(n)
    points = []
    for t in range(1, max_grid + 1):
        lam_t = lambda0 * rho**t
        try:
            out = pdas_solve(problem, lam_t, x0=warm, max_iter=max_iter)
        except SingularGram:
            points.append(
                PathPoint(
                    lam=lam_t,
                    x=warm.copy(),
                    support_size=int(np.count_nonzero(warm)),
                    converged=False,
                    kkt_residual=math.inf,
                    skipped=True,
                )
            )
            continue
        except ActiveSetOverflow:
            points.append(
                PathPoint(
                    lam=lam_t,
                    x=warm.copy(),
                    support_size=int(np.count_nonzero(warm)),
                    converged=False,
                    kkt_residual=math.inf,
                    skipped=True,
                )
            )
            break
        x_t = out.state.x
        points.append(
            PathPoint(
                lam=lam_t,
                x=x_t,
                support_size=int(np.count_nonzero(x_t)),
                converged=out.converged,
                kkt_residual=out.kkt_residual,
                skipped=False,
            )
        )
        warm = x_t
        if points[-1].support_size > cap:
            break
    return SolutionPath(lambda0=lambda0, rho=rho, points=points, cap=cap)


def _eligible(path):
    """Points that may vote: converged, not skipped, support in [1, cap]."""
    return [
        p
        for p in path.points
        if p.converged and not p.skipped and 1 <= p.support_size <= path.cap
    ]


def select_lambda(path):
    """Pick lambda by support-size voting.

    The winning support size is the one attained at the most grid points
    (ties go to the smaller, i.e. sparser, size); the selected lambda is the
    largest one attaining it.
    """
    eligible = _eligible(path)
    if not eligible:
        raise EmptyPath("no converged path point with support size in [1, cap]")
    votes = {}
    for p in eligible:
        votes[p.support_size] = votes.get(p.support_size, 0) + 1
    ell_bar = min(ell for ell, count in votes.items() if count == max(votes.values()))
    lambda_hat = max(p.lam for p in eligible if p.support_size == ell_bar)
    return Selection(lambda_hat=lambda_hat, ell_bar=ell_bar, votes=votes)


def _refit_on_support(problem, x):
    """Unpenalized least squares on the nonzero pattern of ``x``.

    The voting rule picks the largest lambda of the winning plateau, where
    the l1 solution's newest coordinate has only just activated; without a
    refit that shrinkage dominates the error at any scaling.  The support
    is unchanged (up to measure-zero exact cancellations in the refit).
    """
    idx = np.flatnonzero(x)
    psi_a = problem.psi[:, idx]
    vals = solve_spd(cholesky(psi_a.T @ psi_a), psi_a.T @ problem.y)
    out = np.zeros(problem.psi.shape[1])
    out[idx] = vals
    return out


def decode_l1(problem, rho=DEFAULT_RHO, max_grid=DEFAULT_MAX_GRID, max_iter=DEFAULT_MAX_ITER):
    """Full sparse decoder: continuation, voting selection, support refit.

    Returns ``(x_hat, selection, path)`` where ``x_hat`` is the
    least-squares refit on the support of the solution at the selected
    regularization parameter.  The raw (shrunk) path solutions remain
    available on ``path``.
    """
    m, n = problem.psi.shape
    if m < 2 or n < 2:
        raise ValueError(f"need m >= 2 and n >= 2, got m={m}, n={n}")
    path = run_path(problem, rho=rho, max_grid=max_grid, max_iter=max_iter)
    selection = select_lambda(path)
    for p in _eligible(path):
        if p.lam == selection.lambda_hat:
            return _refit_on_support(problem, p.x), selection, path
    raise EmptyPath("selected lambda not found on the path")  # unreachable


def write_path_csv(path, file_path):
    """Dump a path as CSV with columns t, lambda, support_size,
    kkt_residual, converged, skipped."""
    with open(file_path, "w", encoding="utf-8", newline="") as fh:
        fh.write("t,lambda,support_size,kkt_residual,converged,skipped\n")
        for i, p in enumerate(path.points, start=1):
            fh.write(
                f"{i},{p.lam:.17g},{p.support_size},{p.kkt_residual:.17g},"
                f"{int(p.converged)},{int(p.skipped)}\n"
            )
