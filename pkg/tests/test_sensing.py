import math

import numpy as np
import pytest

from onebitcs import (
    DegenerateScale,
    ModelParams,
    elliptic_norm,
    generate,
    scale_constant,
    toeplitz_covariance,
    verify_population_identity,
)


class TestModelParams:
    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(m=0, n=4, s=1),
            dict(m=4, n=0, s=1),
            dict(m=4, n=4, s=0),
            dict(m=4, n=4, s=5),
            dict(m=4, n=4, s=1, nu=1.0),
            dict(m=4, n=4, s=1, nu=-0.1),
            dict(m=4, n=4, s=1, sigma=-1.0),
            dict(m=4, n=4, s=1, flip_prob=1.5),
            dict(m=4, n=4, s=1, seed=-1),
        ],
    )
    def test_invalid_rejected(self, kwargs):
        with pytest.raises(ValueError):
            ModelParams(**kwargs)


class TestScaleConstant:
    def test_noiseless_unflipped(self):
        assert scale_constant(0.0, 0.0) == pytest.approx(math.sqrt(2.0 / math.pi), abs=1e-12)

    @pytest.mark.parametrize("sigma", [0.0, 0.3, 2.0])
    def test_fifty_percent_flips_lose_the_signal(self, sigma):
        assert scale_constant(sigma, 0.5) == 0.0

    def test_certain_flip_reverses_sign(self):
        assert scale_constant(0.0, 1.0) == pytest.approx(-math.sqrt(2.0 / math.pi), abs=1e-12)


class TestGenerate:
    def test_same_seed_bit_identical(self):
        params = ModelParams(m=30, n=12, s=3, nu=0.4, sigma=0.2, flip_prob=0.1, seed=99)
        a, b = generate(params), generate(params)
        assert a.psi.tobytes() == b.psi.tobytes()
        assert a.y.tobytes() == b.y.tobytes()
        assert a.truth.x_star.tobytes() == b.truth.x_star.tobytes()

    def test_noiseless_measurements_are_exact_signs(self):
        p = generate(ModelParams(m=200, n=8, s=4, nu=0.3, sigma=0.0, flip_prob=0.0, seed=5))
        z = p.psi @ p.truth.x_star
        np.testing.assert_array_equal(p.y, np.where(z >= 0, 1.0, -1.0))

    def test_measurements_are_signs(self):
        p = generate(ModelParams(m=50, n=5, s=2, sigma=0.5, flip_prob=0.2, seed=1))
        assert set(np.unique(p.y)) <= {-1.0, 1.0}

    def test_row_covariance_independent_case(self):
        p = generate(ModelParams(m=100_000, n=4, s=1, nu=0.0, seed=2))
        emp = p.psi.T @ p.psi / p.psi.shape[0]
        assert np.max(np.abs(emp - np.eye(4))) < 0.05

    def test_row_covariance_correlated_case(self):
        p = generate(ModelParams(m=100_000, n=3, s=1, nu=0.5, seed=3))
        emp = p.psi.T @ p.psi / p.psi.shape[0]
        expected = np.array([[1.0, 0.5, 0.25], [0.5, 1.0, 0.5], [0.25, 0.5, 1.0]])
        assert np.max(np.abs(emp - expected)) < 0.05

    def test_truth_has_unit_elliptic_norm(self):
        params = ModelParams(m=10, n=50, s=7, nu=0.6, seed=4)
        x = generate(params).truth.x_star
        explicit = float(np.sqrt(x @ toeplitz_covariance(50, 0.6) @ x))
        assert explicit == pytest.approx(1.0, abs=1e-10)
        assert elliptic_norm(x, 0.6) == pytest.approx(explicit, abs=1e-12)

    def test_support_matches_nonzeros(self):
        t = generate(ModelParams(m=10, n=40, s=6, seed=8)).truth
        np.testing.assert_array_equal(np.flatnonzero(t.x_star), t.support)
        assert t.support.size == 6

    def test_flip_fraction_matches_probability(self):
        p = generate(ModelParams(m=100_000, n=4, s=2, sigma=0.0, flip_prob=0.3, seed=6))
        unflipped = np.where(p.psi @ p.truth.x_star >= 0, 1.0, -1.0)
        fraction = float(np.mean(p.y != unflipped))
        assert abs(fraction - 0.3) <= 0.01

    def test_substreams_are_independent(self):
        base = dict(m=25, n=10, s=3, nu=0.2, flip_prob=0.1, seed=11)
        quiet = generate(ModelParams(sigma=0.0, **base))
        noisy = generate(ModelParams(sigma=1.0, **base))
        # changing the noise level must not perturb the other draws
        assert quiet.psi.tobytes() == noisy.psi.tobytes()
        assert quiet.truth.x_star.tobytes() == noisy.truth.x_star.tobytes()


class TestPopulationIdentity:
    def test_correlated_noisy_flipped_case(self):
        params = ModelParams(m=10, n=5, s=5, nu=0.3, sigma=0.1, flip_prob=0.05, seed=0)
        assert verify_population_identity(params, 100_000) <= 0.05

    def test_scalar_case(self):
        params = ModelParams(m=10, n=1, s=1, nu=0.0, sigma=0.0, flip_prob=0.0, seed=0)
        assert verify_population_identity(params, 100_000) <= 0.02

    def test_uninformative_flips_raise(self):
        params = ModelParams(m=10, n=5, s=5, flip_prob=0.5, seed=0)
        with pytest.raises(DegenerateScale):
            verify_population_identity(params, 10_000)
