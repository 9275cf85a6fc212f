import math

import numpy as np
import pytest

from polestim.distributions import theta_moments
from polestim.errors import DomainError
from polestim.estimation import EventCounts
from polestim.probabilities import coarse_probs_array
from polestim.sampling import (
    RNG_ALGORITHM,
    TRIAL_BLOCK,
    chi_square_vs_exact,
    make_generator,
    pearson_chi_square,
    rng_metadata,
    run_trials,
    sample_count_batch,
    sample_counts,
)
from polestim.states import ReducedParams

PI = math.pi
EQ = ReducedParams(PI / 2, PI / 4)


@pytest.mark.parametrize("seed", [0, 1, 99])
def test_poles_deterministic(seed):
    assert sample_counts(ReducedParams(0.0, 0.3), 10, seed) == EventCounts(10, 0, 0, 0)
    assert sample_counts(ReducedParams(PI, 0.3), 10, seed) == EventCounts(0, 10, 0, 0)


def test_large_n_frequencies():
    n = 10**6
    freq = sample_counts(EQ, n, seed=5).as_array() / n
    sigma = math.sqrt(0.25 * 0.75 / n)
    assert np.all(np.abs(freq - 0.25) < 4 * sigma)


@pytest.mark.parametrize("point", [(0.3, 0.2), (1.0, 0.7), (PI / 2, 0.1), (2.2, 1.4), (2.9, 0.9)])
def test_single_shot_marginals(point):
    rp = ReducedParams(*point)
    draws = sample_count_batch(rp, 1, 10**6, seed=17)
    assert np.all(draws.sum(axis=1) == 1)
    freq = draws.mean(axis=0)
    p = coarse_probs_array(*point)
    band = 5 * np.sqrt(p * (1 - p) / 10**6)
    assert np.all(np.abs(freq - p) <= band + 1e-12)


def test_counts_sum_to_n():
    draws = sample_count_batch(ReducedParams(1.0, 0.4), 37, 1000, seed=3)
    assert draws.shape == (1000, 4) and np.all(draws.sum(axis=1) == 37) and np.all(draws >= 0)


def test_determinism():
    a = sample_count_batch(EQ, 50, 100, seed=4, stream=2)
    b = sample_count_batch(EQ, 50, 100, seed=4, stream=2)
    c = sample_count_batch(EQ, 50, 100, seed=4, stream=3)
    assert np.array_equal(a, b) and not np.array_equal(a, c)
    s1 = run_trials(EQ, 20, 500, seed=8)
    s2 = run_trials(EQ, 20, 500, seed=8)
    assert np.array_equal(s1.counts, s2.counts)
    assert s1.empirical_variance_theta == s2.empirical_variance_theta


def test_blocks_reproduce_serial():
    trials = TRIAL_BLOCK + 100
    summary = run_trials(EQ, 5, trials, seed=2)
    first = sample_count_batch(EQ, 5, TRIAL_BLOCK, seed=2, stream=0)
    second = sample_count_batch(EQ, 5, 100, seed=2, stream=1)
    assert np.array_equal(summary.counts, np.concatenate([first, second]))


def test_failures_counted():
    summary = run_trials(ReducedParams(0.0, 0.5), 10, 200, seed=1)
    assert summary.failure_count == 200
    assert len(summary.estimates_delta) == 0
    assert math.isnan(summary.empirical_bias_delta)
    s = run_trials(ReducedParams(0.4, 0.5), 3, 1000, seed=1)
    assert len(s.estimates_delta) + s.failure_count == s.trials == 1000


def test_empirical_variance_matches_exact():
    n, trials = 100, 10**5
    summary = run_trials(EQ, n, trials, seed=21)
    exact = theta_moments(PI / 2, n).normalized_variance
    empirical = 2 * n * summary.empirical_variance_theta
    x = summary.estimates_theta
    m4 = np.mean((x - x.mean()) ** 4)
    se = 2 * n * math.sqrt((m4 - summary.empirical_variance_theta**2) / trials)
    assert abs(empirical - exact) < 3 * se


def test_chi_square_correct_and_wrong_model():
    _, dof, p = chi_square_vs_exact(EQ, 50, 10**5, seed=0)
    assert p > 0.001 and dof > 10
    _, _, p_wrong = chi_square_vs_exact(ReducedParams(1.2, PI / 4), 50, 10**5, seed=0, model=EQ)
    assert p_wrong < 1e-6


def test_chi_square_too_few_trials():
    with pytest.raises(DomainError):
        chi_square_vs_exact(EQ, 50, 1, seed=0)
    with pytest.raises(DomainError):
        pearson_chi_square([0, 0, 1], [0, 1], [0.5, 0.5])


def test_pearson_exact_fit():
    keys = np.repeat([0, 1, 2], [25, 50, 25])
    stat, dof, p = pearson_chi_square(keys, [0, 1, 2], [0.25, 0.5, 0.25])
    assert stat == 0.0 and dof == 2 and p == 1.0


def test_metadata_and_validation():
    meta = rng_metadata()
    assert meta["rng"] == RNG_ALGORITHM == "PCG64"
    with pytest.raises(DomainError):
        make_generator(-1)
    with pytest.raises(DomainError):
        sample_count_batch(EQ, 0, 5, seed=0)
    with pytest.raises(DomainError):
        run_trials(EQ, 5, 0, seed=0)
