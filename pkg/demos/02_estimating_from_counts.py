"""Estimating theta and delta_phi from one simulated run.

We simulate N shots, count the four event classes, and apply the closed-form
maximum-likelihood estimators. The second part shows the phase-gate trick:
adding a known phase epsilon to the second photon moves delta_phi towards
pi/4, where the estimator behaves best, and epsilon/2 is added back.
"""

import math

from polestim.estimation import estimate, mle_delta_shifted
from polestim.sampling import sample_counts
from polestim.states import PolarizationParams, apply_phase_shift, reduce

truth = PolarizationParams(theta=1.2, phi1=2.2, phi2=0.0)
rp = reduce(truth)
print(f"true theta = {rp.theta:.4f}, true delta_phi = {rp.delta_phi:.4f}")

for n in (10, 100, 1000, 10000):
    counts = sample_counts(rp, n, seed=2024)
    result = estimate(counts)
    delta = "FAILURE" if result.failed else f"{result.delta_hat:.4f}"
    print(f"N={n:>5}  counts(DB_H, DB_V, SB, C)={tuple(int(k) for k in counts.as_array())}  "
          f"theta_hat={result.theta_hat:.4f}  delta_hat={delta}  Hessian negative: {result.hessian_ok}")

# delta_phi = 1.1 is far from pi/4. Since phi1 > phi2, a gate epsilon on
# photon 2 leaves an effective delta_phi - epsilon/2; choose epsilon so that
# this is pi/4.
epsilon = 2 * (rp.delta_phi - math.pi / 4)
shifted = reduce(apply_phase_shift(truth, epsilon))
print(f"\nafter a gate of {epsilon:.4f} rad the effective delta_phi is {shifted.delta_phi:.4f}")
counts = sample_counts(shifted, 10000, seed=7)
print(f"shifted estimate + epsilon/2 = {mle_delta_shifted(counts, epsilon):.4f}")

# With no SB or C events there is nothing to estimate delta_phi from.
print(f"\nat theta = 0: {estimate(sample_counts(reduce(PolarizationParams(0.0, 1.0, 0.0)), 50, seed=1))}")
