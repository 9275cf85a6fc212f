"""How many shots until the estimators reach the bound?

The estimators take finitely many values, so their distributions can be
computed exactly. This script reports bias and CRB-normalized variance as
N grows, the probability that delta_phi cannot be estimated at all, and how
close the standardized distributions are to a Gaussian.
"""

import math

from polestim.distributions import (
    delta_distribution,
    delta_moments,
    max_normal_deviation,
    p_fail,
    theta_distribution,
    theta_moments,
)
from polestim.states import ReducedParams

print("theta_hat at theta = pi/2 and pi/5")
for n in (10, 25, 100, 400, 1600):
    eq, off = theta_moments(math.pi / 2, n), theta_moments(math.pi / 5, n)
    print(f"  N={n:>5}  2N var = {eq.normalized_variance:.5f} (bias {eq.bias:+.1e})   "
          f"2N var = {off.normalized_variance:.5f} (bias {off.bias:+.2e})")

print("\ndelta_phi_hat at delta_phi = pi/4, conditional on success")
for theta in (math.pi / 2, math.pi / 3):
    rp = ReducedParams(theta, math.pi / 4)
    for n in (25, 100, 400):
        m = delta_moments(rp, n)
        print(f"  theta={theta:.3f} N={n:>4}  2N sin^2 var = {m.normalized_variance:.5f}  "
              f"P(fail) = {p_fail(theta, n):.2e}")

print("\nKolmogorov distance to the normal law")
for n in (1, 25, 100, 400):
    d_theta = max_normal_deviation(theta_distribution(math.pi / 2, n))
    d_delta = max_normal_deviation(delta_distribution(ReducedParams(math.pi / 2, math.pi / 8), n))
    print(f"  N={n:>4}  theta_hat {d_theta:.4f}   delta_hat (delta_phi = pi/8) {d_delta:.4f}")
