import numpy as np
import pytest

from onebitcs import ModelParams, generate


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def make_problem(m, n, s=3, nu=0.0, sigma=0.1, flip_prob=0.02, seed=0):
    """Small synthetic instance for solver tests."""
    return generate(
        ModelParams(m=m, n=n, s=min(s, n), nu=nu, sigma=sigma, flip_prob=flip_prob, seed=seed)
    )


def lambda_max(problem):
    """Smallest lambda whose l1 solution is exactly zero."""
    m = problem.psi.shape[0]
    return float(np.max(np.abs(problem.psi.T @ problem.y / m)))
