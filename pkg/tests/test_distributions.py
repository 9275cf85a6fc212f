import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polestim.distributions import (
    cumulative,
    delta_distribution,
    delta_distribution_bruteforce,
    delta_moments,
    max_normal_deviation,
    moments,
    normal_cdf,
    p_fail,
    standardized_cumulative,
    theta_distribution,
    theta_distribution_bruteforce,
    theta_moments,
)
from polestim.errors import DegenerateError, DomainError, NoDataError
from polestim.states import ReducedParams

PI = math.pi
HALF_PI = PI / 2


class TestTheta:
    def test_pole(self):
        for n in (1, 7, 300):
            d = theta_distribution(0.0, n)
            assert list(d.values) == [0.0] and list(d.probs) == [1.0]

    def test_equator_n1(self):
        d = theta_distribution(HALF_PI, 1)
        assert np.allclose(d.values, [0, HALF_PI, PI])
        assert np.allclose(d.probs, [0.25, 0.5, 0.25], atol=1e-15)
        assert d.failure_mass == 0.0

    @pytest.mark.parametrize("n", [1, 5, 40, 333])
    def test_equator_symmetric(self, n):
        probs = theta_distribution(HALF_PI, n).as_dict()
        assert all(probs[m] == probs[-m] for m in probs)

    def test_matches_binomial_oracle(self):
        theta, n = 1.1, 12
        got = theta_distribution(theta, n).as_dict()
        p = mpmath.cos(mpmath.mpf(theta) / 2) ** 2
        for m in range(-n, n + 1):
            exact = mpmath.binomial(2 * n, n + m) * p ** (n + m) * (1 - p) ** (n - m)
            assert got[m] == pytest.approx(float(exact), rel=1e-12)

    def test_values_increasing(self):
        d = theta_distribution(0.9, 50)
        assert np.all(np.diff(d.values) > 0)

    @pytest.mark.parametrize("n", [0, -1, 2.5])
    def test_bad_n(self, n):
        with pytest.raises(DomainError):
            theta_distribution(1.0, n)


class TestDelta:
    @pytest.mark.parametrize("d", [0.2, HALF_PI / 2, 1.3])
    def test_n1(self, d):
        dist = delta_distribution(ReducedParams(HALF_PI, d), 1)
        got = dict(zip(dist.key_tuples(), dist.probs))
        assert got[(1, 0)] == pytest.approx(0.5 * math.sin(d) ** 2, abs=1e-15)
        assert got[(0, 1)] == pytest.approx(0.5 * math.cos(d) ** 2, abs=1e-15)
        assert dist.failure_mass == pytest.approx(0.5, abs=1e-15)

    @pytest.mark.parametrize("theta", [0.0, PI])
    def test_pole_fails(self, theta):
        dist = delta_distribution(ReducedParams(theta, 0.4), 25)
        assert dist.failure_mass == 1.0 and len(dist) == 0
        with pytest.raises(NoDataError):
            dist.conditional_probs()
        with pytest.raises(NoDataError):
            delta_moments(ReducedParams(theta, 0.4), 25)

    @given(st.floats(0.01, PI - 0.01), st.floats(0, HALF_PI), st.integers(1, 60))
    @settings(max_examples=50)
    def test_conditional_sums_to_one(self, t, d, n):
        dist = delta_distribution(ReducedParams(t, d), n)
        assert math.fsum(dist.conditional_probs()) == pytest.approx(1.0, abs=1e-12)
        assert dist.total_mass == pytest.approx(1.0, abs=1e-10)

    def test_keys_reduced_and_values_increasing(self):
        dist = delta_distribution(ReducedParams(1.0, 0.5), 30)
        assert all(math.gcd(a, b) == 1 for a, b in dist.key_tuples())
        assert np.all(np.diff(dist.values) > 0)
        assert np.allclose(dist.values, dist.center + dist.offsets, atol=1e-15)


class TestBruteForce:
    def test_delta_pointwise(self):
        rp = ReducedParams(1.2, 0.6)
        dist = delta_distribution(rp, 20)
        brute, fail = delta_distribution_bruteforce(rp, 20)
        assert set(brute) == set(dist.as_dict())
        for k, v in dist.as_dict().items():
            assert abs(brute[k] - v) < 1e-10
        assert fail == pytest.approx(p_fail(1.2, 20), rel=1e-12)

    def test_delta_n1(self):
        brute, fail = delta_distribution_bruteforce(ReducedParams(HALF_PI, 0.3), 1)
        assert brute[(1, 0)] == pytest.approx(0.5 * math.sin(0.3) ** 2)
        assert fail == pytest.approx(0.5)

    def test_theta(self):
        brute = theta_distribution_bruteforce(0.7, 15)
        for k, v in theta_distribution(0.7, 15).as_dict().items():
            assert abs(brute[k] - v) < 1e-10

    def test_limit(self):
        with pytest.raises(DomainError):
            delta_distribution_bruteforce(ReducedParams(1.0, 0.2), 61)


class TestPFail:
    def test_examples(self):
        assert p_fail(HALF_PI, 10) == 2.0**-10
        assert p_fail(0.0, 17) == 1.0
        assert p_fail(PI / 3, 2) == pytest.approx(25 / 64, rel=1e-15)

    @given(st.floats(1e-3, PI - 1e-3), st.integers(1, 500))
    def test_monotone_in_n(self, t, n):
        assert p_fail(t, n + 1) <= p_fail(t, n)

    def test_grows_toward_poles(self):
        vals = [p_fail(t, 20) for t in np.linspace(HALF_PI, 0, 20)]
        assert np.all(np.diff(vals) > 0)


class TestCumulative:
    def test_examples(self):
        d = theta_distribution(HALF_PI, 1)
        assert cumulative(d, -1.0) == 0.0
        assert cumulative(d, PI) == 1.0
        assert cumulative(d, HALF_PI) == pytest.approx(0.75)

    def test_conditional(self):
        d = delta_distribution(ReducedParams(HALF_PI, 0.4), 1)
        assert cumulative(d, 0.0) == pytest.approx(math.cos(0.4) ** 2)
        assert cumulative(d, HALF_PI) == 1.0


class TestMoments:
    @pytest.mark.parametrize("n", [1, 2, 25, 100, 400])
    @pytest.mark.parametrize("theta", [0.0, HALF_PI, PI])
    def test_theta_unbiased(self, n, theta):
        assert theta_moments(theta, n).bias == 0.0

    @pytest.mark.parametrize("n", [1, 3, 25, 100])
    @pytest.mark.parametrize("d", [0.0, PI / 4, HALF_PI])
    def test_delta_unbiased(self, n, d):
        assert delta_moments(ReducedParams(HALF_PI, d), n).bias == 0.0

    def test_saturation_n100(self):
        assert 0.9 <= theta_moments(HALF_PI, 100).normalized_variance <= 1.1

    def test_frozen_values(self):
        assert theta_moments(HALF_PI, 100).normalized_variance == pytest.approx(1.00505, abs=1e-5)
        assert delta_moments(ReducedParams(HALF_PI, PI / 4), 100).normalized_variance == pytest.approx(1.0319, abs=1e-4)

    def test_approach_to_crb(self):
        vals = [theta_moments(HALF_PI, n).normalized_variance for n in (25, 100, 400, 1600)]
        gaps = [abs(v - 1) for v in vals]
        assert all(a > b for a, b in zip(gaps, gaps[1:]))

    def test_direct_formula(self):
        d = theta_distribution(1.0, 30)
        w = d.probs / d.probs.sum()
        mean = np.sum(w * d.values)
        var = np.sum(w * (d.values - mean) ** 2)
        m = moments(d, 1.0, 1 / 60)
        assert m.mean == pytest.approx(mean, abs=1e-14)
        assert m.variance == pytest.approx(var, rel=1e-12)
        assert m.normalized_variance == pytest.approx(60 * var, rel=1e-12)

    def test_bad_crb(self):
        with pytest.raises(DomainError):
            moments(theta_distribution(1.0, 3), 1.0, 0.0)

    def test_nonnegative_variance(self):
        assert theta_moments(0.0, 5).variance == 0.0


class TestStandardized:
    def test_standardization(self):
        for d in (theta_distribution(1.0, 40), delta_distribution(ReducedParams(1.0, 0.3), 40)):
            z, cdf = standardized_cumulative(d)
            w = d.conditional_probs()
            assert math.fsum(w * z) == pytest.approx(0.0, abs=1e-10)
            assert math.fsum(w * z * z) == pytest.approx(1.0, abs=1e-10)
            assert cdf[-1] == 1.0 and np.all(np.diff(cdf) >= 0)

    def test_point_mass(self):
        with pytest.raises(DegenerateError):
            standardized_cumulative(theta_distribution(0.0, 5))

    def test_gaussianization(self):
        devs = [max_normal_deviation(theta_distribution(HALF_PI, n)) for n in (25, 400)]
        assert devs[1] < devs[0]
        assert max_normal_deviation(theta_distribution(HALF_PI, 1)) > 0.1


class TestNormalCdf:
    def test_examples(self):
        assert normal_cdf(0.0) == 0.5
        assert abs(normal_cdf(40.0) - 1.0) < 1e-12
        assert normal_cdf(1.959964) == pytest.approx(0.975, abs=1e-5)

    @given(st.floats(-30, 30))
    def test_against_mpmath(self, x):
        assert abs(normal_cdf(x) - float(mpmath.ncdf(x))) < 1e-12

    def test_vectorized(self):
        assert normal_cdf(np.array([0.0, 0.0])).shape == (2,)
