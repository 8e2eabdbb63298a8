"""Generative model for 1-bit measurements and synthetic problem instances.

A problem instance is ``y = eta * sign(Psi @ x_star + eps)`` where the rows
of Psi are N(0, Sigma) with the banded correlation Sigma[j, k] = nu**|j-k|,
eps is iid N(0, sigma^2) pre-quantization noise, and eta flips each recorded
sign independently with probability ``flip_prob``.  sign(0) is +1 so the
quantizer is deterministic.

Randomness is split into four independent substreams of a seeded PCG64
generator so that, e.g., changing sigma never perturbs the draw of Psi:

    stream 0  rows of Psi
    stream 1  signal support and values
    stream 2  pre-quantization noise
    stream 3  sign flips

Substream k of seed S is ``default_rng(SeedSequence(S, spawn_key=(k,)))``.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter

from .errors import DegenerateScale

__all__ = [
    "ModelParams",
    "GroundTruth",
    "SensingProblem",
    "scale_constant",
    "toeplitz_covariance",
    "elliptic_norm",
    "generate",
    "verify_population_identity",
    "substream",
]

_PSI_STREAM, _SIGNAL_STREAM, _NOISE_STREAM, _FLIP_STREAM = range(4)


def substream(seed, stream):
    """Independent generator for one of the documented substreams."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream,)))


@dataclass(frozen=True)
class ModelParams:
    """Scenario parameters {m, n, s, nu, sigma, flip_prob} plus a seed.

    Parameters
    ----------
    m : int
        Number of 1-bit measurements.
    n : int
        Ambient signal dimension.
    s : int
        Number of nonzeros in the true signal.
    nu : float
        Row correlation in [0, 1); Sigma[j, k] = nu**|j-k|.
    sigma : float
        Standard deviation of the pre-quantization noise, >= 0.
    flip_prob : float
        Probability in [0, 1] that a recorded sign is flipped.
    seed : int
        Seed of the generator; identical seeds give bit-identical problems.
    """

    m: int
    n: int
    s: int
    nu: float = 0.0
    sigma: float = 0.0
    flip_prob: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if not 1 <= self.s <= self.n:
            raise ValueError(f"s must be in [1, n], got s={self.s}, n={self.n}")
        if not 0.0 <= self.nu < 1.0:
            raise ValueError(f"nu must be in [0, 1), got {self.nu}")
        if self.sigma < 0.0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")
        if not 0.0 <= self.flip_prob <= 1.0:
            raise ValueError(f"flip_prob must be in [0, 1], got {self.flip_prob}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a u64, got {self.seed}")


@dataclass(frozen=True)
class GroundTruth:
    """The planted signal behind a synthetic problem."""

    x_star: np.ndarray
    support: np.ndarray
    c_scale: float
    params: ModelParams


@dataclass(frozen=True)
class SensingProblem:
    """A sensing matrix, its 1-bit measurements, and (optionally) the truth."""

    psi: np.ndarray
    y: np.ndarray
    truth: GroundTruth | None = field(default=None)

    @property
    def m(self):
        return self.psi.shape[0]

    @property
    def n(self):
        return self.psi.shape[1]


def scale_constant(sigma, flip_prob):
    """Population scale relating the sign-correlation vector to the signal.

    Returns ``(2 q - 1) * sqrt(2 / (pi (sigma^2 + 1)))`` with
    ``q = 1 - flip_prob`` the probability a sign survives unflipped.
    Zero (flip_prob = 1/2) means the measurements carry no direction
    information; callers treat that as degenerate.
    """
    if sigma < 0.0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    if not 0.0 <= flip_prob <= 1.0:
        raise ValueError(f"flip_prob must be in [0, 1], got {flip_prob}")
    q = 1.0 - flip_prob
    return (2.0 * q - 1.0) * math.sqrt(2.0 / (math.pi * (sigma**2 + 1.0)))


def toeplitz_covariance(n, nu):
    """Explicit covariance matrix Sigma[j, k] = nu**|j-k| (0**0 == 1)."""
    idx = np.arange(n)
    return nu ** np.abs(idx[:, None] - idx[None, :]).astype(float)


def elliptic_norm(x, nu):
    """sqrt(x.T @ Sigma @ x) for the banded Sigma, using only the nonzeros."""
    x = np.asarray(x, dtype=float)
    nz = np.flatnonzero(x)
    if nz.size == 0:
        return 0.0
    vals = x[nz]
    sig = nu ** np.abs(nz[:, None] - nz[None, :]).astype(float)
    return float(np.sqrt(vals @ sig @ vals))


def _draw_rows(rng, m, n, nu):
    """m iid rows from N(0, Sigma) via the AR(1) recursion across columns.

    Column 0 is standard normal; column j is nu * column_{j-1} plus
    sqrt(1 - nu^2) times a fresh standard normal, which reproduces the
    banded covariance exactly and costs O(m n).
    """
    g = rng.standard_normal((m, n))
    if nu == 0.0 or n == 1:
        return g
    g[:, 1:] *= math.sqrt(1.0 - nu**2)
    return lfilter([1.0], [1.0, -nu], g, axis=1)


def _draw_truth(rng, params):
    """Sparse signal with unit elliptic norm on a uniformly random support.

    Nonzeros are random signs of one common magnitude.  Equal magnitudes
    keep the smallest entry as large as the normalization allows, which is
    what makes exact support recovery achievable at the benchmark sample
    sizes; spreading the magnitudes (e.g. Gaussian values) routinely drops
    the smallest entry below the identifiable level.
    """
    support = np.sort(rng.choice(params.n, size=params.s, replace=False))
    x_star = np.zeros(params.n)
    x_star[support] = rng.choice([-1.0, 1.0], size=params.s)
    x_star /= elliptic_norm(x_star, params.nu)
    return x_star, support


def generate(params):
    """Draw a reproducible synthetic problem instance.

    Identical ``params`` (seed included) give bit-identical output.
    """
    psi = _draw_rows(substream(params.seed, _PSI_STREAM), params.m, params.n, params.nu)
    x_star, support = _draw_truth(substream(params.seed, _SIGNAL_STREAM), params)
    eps = params.sigma * substream(params.seed, _NOISE_STREAM).standard_normal(params.m)
    flips = substream(params.seed, _FLIP_STREAM).random(params.m) < params.flip_prob

    z = psi @ x_star + eps
    y = np.where(z >= 0.0, 1.0, -1.0)
    y[flips] = -y[flips]

    truth = GroundTruth(
        x_star=x_star,
        support=support,
        c_scale=scale_constant(params.sigma, params.flip_prob),
        params=params,
    )
    return SensingProblem(psi=psi, y=y, truth=truth)


def verify_population_identity(params, mc_samples):
    """Monte-Carlo check that Sigma^{-1} E[y psi] / c recovers the signal.

    Draws ``mc_samples`` fresh measurement pairs from the model of
    ``params``, forms the inverse-covariance-corrected sample correlation
    divided by the scale constant, and returns its l2 distance to the true
    signal.  The distance tends to zero as the sample count grows.
    """
    if mc_samples < 1:
        raise ValueError(f"mc_samples must be >= 1, got {mc_samples}")
    c = scale_constant(params.sigma, params.flip_prob)
    if abs(c) < 1e-12:
        raise DegenerateScale(
            f"scale constant {c:.3e} is numerically zero (flip_prob={params.flip_prob})"
        )
    mc_params = dataclasses.replace(params, m=int(mc_samples))
    prob = generate(mc_params)
    corr = prob.psi.T @ prob.y / mc_samples
    sigma_mat = toeplitz_covariance(params.n, params.nu)
    estimate = np.linalg.solve(sigma_mat, corr) / c
    return float(np.linalg.norm(estimate - prob.truth.x_star))
