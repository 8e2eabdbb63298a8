"""Recovery metrics: l2 errors under three scalings, support recovery, PSNR.

Because a 1-bit decoder can only recover the signal up to scale, every
report carries three l2 errors: the raw one, the one descaled by the model
constant, and the one at the best possible scalar multiple.  Aggregation
averages them and turns the exact-support-recovery flag into a percentage.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DecodeReport",
    "AggregateSummary",
    "REPORT_COLUMNS",
    "report",
    "psnr",
    "aggregate",
    "format_real",
    "report_to_row",
    "row_to_report",
]

# Documented column order of the report CSV schema.
REPORT_COLUMNS = (
    "err_raw",
    "err_descaled",
    "err_optscale",
    "support_exact",
    "psnr",
    "wall_time",
)


@dataclass(frozen=True)
class DecodeReport:
    """Per-decode metrics.

    ``err_descaled`` is NaN when the model's scale constant is numerically
    zero (no preferred direction).  ``psnr`` is +inf for an exact recovery.
    """

    err_raw: float
    err_descaled: float
    err_optscale: float
    support_exact: bool
    psnr: float
    wall_time: float


@dataclass(frozen=True)
class AggregateSummary:
    """Arithmetic means over reports; PrE is the exact-support percentage."""

    mean_err_raw: float
    mean_err_descaled: float
    mean_err_optscale: float
    pre_percent: float
    mean_time: float


def psnr(x_hat, x_star):
    """10 log10(V^2 / MSE) with V the largest absolute true entry.

    Returns +inf when the reconstruction is exact (MSE = 0).
    """
    x_hat = np.asarray(x_hat, dtype=float)
    x_star = np.asarray(x_star, dtype=float)
    if x_hat.shape != x_star.shape:
        raise ValueError(f"shape mismatch: {x_hat.shape} vs {x_star.shape}")
    v = float(np.max(np.abs(x_star)))
    if v == 0.0:
        raise ValueError("true signal is identically zero")
    mse = float(np.mean((x_hat - x_star) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(v**2 / mse)


def report(x_hat, truth, wall_time=0.0):
    """Compute all metrics of an estimate against the ground truth."""
    x_hat = np.asarray(x_hat, dtype=float)
    x_star = truth.x_star
    if x_hat.shape != x_star.shape:
        raise ValueError(f"shape mismatch: {x_hat.shape} vs {x_star.shape}")

    err_raw = float(np.linalg.norm(x_hat - x_star))
    c = truth.c_scale
    if abs(c) > 1e-12:
        err_descaled = float(np.linalg.norm(x_hat / c - x_star))
    else:
        err_descaled = math.nan
    sq = float(x_hat @ x_hat)
    alpha = float(x_hat @ x_star) / sq if sq > 0.0 else 0.0
    err_optscale = float(np.linalg.norm(alpha * x_hat - x_star))
    support_exact = bool(np.array_equal(x_hat != 0.0, x_star != 0.0))
    return DecodeReport(
        err_raw=err_raw,
        err_descaled=err_descaled,
        err_optscale=err_optscale,
        support_exact=support_exact,
        psnr=psnr(x_hat, x_star),
        wall_time=float(wall_time),
    )


def aggregate(reports):
    """Mean errors, exact-support percentage, and mean wall time."""
    if not reports:
        raise ValueError("no reports to aggregate")
    return AggregateSummary(
        mean_err_raw=float(np.mean([r.err_raw for r in reports])),
        mean_err_descaled=float(np.mean([r.err_descaled for r in reports])),
        mean_err_optscale=float(np.mean([r.err_optscale for r in reports])),
        pre_percent=100.0 * sum(r.support_exact for r in reports) / len(reports),
        mean_time=float(np.mean([r.wall_time for r in reports])),
    )


def format_real(value):
    """Render a real with 17 significant digits (exact float round trip)."""
    return f"{value:.17g}"


def report_to_row(rep):
    """Serialize a report as CSV cells in REPORT_COLUMNS order."""
    return [
        format_real(rep.err_raw),
        format_real(rep.err_descaled),
        format_real(rep.err_optscale),
        str(int(rep.support_exact)),
        format_real(rep.psnr),
        format_real(rep.wall_time),
    ]


def row_to_report(cells):
    """Parse CSV cells written by report_to_row."""
    if len(cells) != len(REPORT_COLUMNS):
        raise ValueError(f"expected {len(REPORT_COLUMNS)} cells, got {len(cells)}")
    return DecodeReport(
        err_raw=float(cells[0]),
        err_descaled=float(cells[1]),
        err_optscale=float(cells[2]),
        support_exact=bool(int(cells[3])),
        psnr=float(cells[4]),
        wall_time=float(cells[5]),
    )
