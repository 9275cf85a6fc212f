"""Where do the two photons go?

Two photons with the same polar angle but different phases meet on a
balanced beam splitter. This script tabulates the four event classes along
a sweep of theta and checks the closed forms against a from-scratch
propagation of the two-photon amplitudes through the optics.
"""

import math

import numpy as np

from polestim.optics import detailed_probs_oracle, pattern_from_detectors
from polestim.probabilities import ALL_PATTERNS, EVENT_ORDER, coarse_probs, detailed_probs, pattern_label
from polestim.states import PolarizationParams, ReducedParams, reduce

delta = math.pi / 6
print(f"Class probabilities at delta_phi = {delta:.4f}")
print("theta    " + "  ".join(f"{e.value:>6}" for e in EVENT_ORDER))
for theta in np.linspace(0, math.pi, 7):
    c = coarse_probs(ReducedParams(theta, delta))
    print(f"{theta:6.4f}  " + "  ".join(f"{p:6.4f}" for p in c.as_array()))

# At the poles both photons are identical and always bunch onto one detector.
# Coincidences need a phase difference: P_C / (P_C + P_SB) = sin^2(delta_phi).
params = PolarizationParams(theta=1.1, phi1=0.9, phi2=0.2)
rp = reduce(params)
closed = detailed_probs(rp)
oracle = detailed_probs_oracle(params)
print(f"\nTen detector patterns at theta = 1.1, phases (0.9, 0.2) -> delta_phi = {rp.delta_phi:.3f}")
for pattern in ALL_PATTERNS:
    a, b = closed[pattern], oracle[pattern_from_detectors(pattern)]
    print(f"  {pattern_label(pattern)}  closed form {a:.12f}   amplitude oracle {b:.12f}")
worst = max(abs(closed[p] - oracle[pattern_from_detectors(p)]) for p in ALL_PATTERNS)
print(f"largest disagreement: {worst:.1e}")
