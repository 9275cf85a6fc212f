"""Simulated experiments agree with the exact distributions.

Repeating the N-shot experiment many times gives an empirical distribution
of theta_hat that should be statistically indistinguishable from the exact
one. A chi-square test quantifies it, and a deliberately wrong model shows
that the test has power.
"""

import math

from polestim.distributions import delta_moments, theta_moments
from polestim.sampling import chi_square_vs_exact, rng_metadata, run_trials
from polestim.states import ReducedParams

rp = ReducedParams(math.pi / 2, math.pi / 4)
n, trials = 50, 100_000
print(f"RNG: {rng_metadata()['rng']}, {trials} trials of N = {n}")

summary = run_trials(rp, n, trials, seed=1)
print(f"2N var(theta_hat): simulated {2 * n * summary.empirical_variance_theta:.5f}, "
      f"exact {theta_moments(rp.theta, n).normalized_variance:.5f}")
print(f"2N var(delta_hat): simulated {2 * n * summary.empirical_variance_delta:.5f}, "
      f"exact {delta_moments(rp, n).normalized_variance:.5f}")
print(f"failed delta estimates: {summary.failure_count}")

for seed in range(5):
    stat, dof, p = chi_square_vs_exact(rp, n, trials, seed)
    print(f"seed {seed}: chi2 = {stat:7.2f} on {dof} dof, p = {p:.3f}")

stat, dof, p = chi_square_vs_exact(ReducedParams(1.2, math.pi / 4), n, trials, 0, model=rp)
print(f"samples at theta = 1.2 against the theta = pi/2 model: p = {p:.1e}")
