"""First-principles two-photon amplitudes through the beam splitter.

Independent of the closed forms in :mod:`polestim.probabilities`: each photon's
creation-operator coefficients are propagated through the 4x4 mode unitary and
the two-photon transition amplitude is the permanent of the 2x2 matrix of
single-photon output amplitudes, divided by ``sqrt(prod n_m!)``.

Mode order (inputs and outputs alike): ``(H,1), (V,1), (H,2), (V,2)``.
"""

from __future__ import annotations

import math
from itertools import combinations_with_replacement

import numpy as np

from .errors import DomainError
from .states import PolarizationParams

__all__ = [
    "MODES",
    "build_mode_unitary",
    "input_mode_amplitudes",
    "outcome_amplitude",
    "all_outcome_patterns",
    "detailed_probs_oracle",
    "pattern_from_detectors",
]

MODES = ("H1", "V1", "H2", "V2")

_BS = np.array([[1.0, 1.0], [-1.0, 1.0]]) / math.sqrt(2.0)


def build_mode_unitary() -> np.ndarray:
    """Beam splitter on the spatial index, identity on polarization.

    ``U[out, in]`` with ``U[(X,j), (X,i)] = BS[j, i]``; H never couples to V.
    """
    return np.kron(_BS, np.eye(2)).astype(complex)


def input_mode_amplitudes(params: PolarizationParams) -> tuple[np.ndarray, np.ndarray]:
    half = 0.5 * params.theta
    c, s = math.cos(half), math.sin(half)
    photon1 = np.array([c, s * np.exp(1j * params.phi1), 0.0, 0.0], dtype=complex)
    photon2 = np.array([0.0, 0.0, c, s * np.exp(1j * params.phi2)], dtype=complex)
    return photon1, photon2


def _permanent2(m: np.ndarray) -> complex:
    return m[0, 0] * m[1, 1] + m[0, 1] * m[1, 0]


def _validate(pattern) -> tuple[int, int, int, int]:
    occ = tuple(int(n) for n in pattern)
    if len(occ) != 4 or any(n < 0 for n in occ) or sum(occ) != 2:
        raise DomainError(f"pattern must be 4 nonnegative occupations summing to 2, got {pattern!r}")
    return occ


def _amplitude(occ, outputs: np.ndarray) -> complex:
    # outputs[k, mode]: amplitude of photon k in each output mode
    slots = [mode for mode, n in enumerate(occ) for _ in range(n)]
    m = outputs[:, slots].T
    norm = math.sqrt(math.prod(math.factorial(n) for n in occ))
    return complex(_permanent2(m) / norm)


def outcome_amplitude(pattern, unitary: np.ndarray, params: PolarizationParams) -> complex:
    """Amplitude of the output Fock state with the given mode occupations."""
    occ = _validate(pattern)
    outputs = np.array([unitary @ v for v in input_mode_amplitudes(params)])
    return _amplitude(occ, outputs)


def all_outcome_patterns() -> list[tuple[int, int, int, int]]:
    """The ten two-photon occupation patterns over the four output modes."""
    out = []
    for a, b in combinations_with_replacement(range(4), 2):
        occ = [0, 0, 0, 0]
        occ[a] += 1
        occ[b] += 1
        out.append(tuple(occ))
    return out


_PATTERNS = tuple(all_outcome_patterns())


def pattern_from_detectors(pair) -> tuple[int, int, int, int]:
    occ = [0, 0, 0, 0]
    for d in pair:
        occ[int(d)] += 1
    return _validate(occ)


def detailed_probs_oracle(params: PolarizationParams) -> dict[tuple[int, int, int, int], float]:
    unitary = build_mode_unitary()
    outputs = np.array([unitary @ v for v in input_mode_amplitudes(params)])
    return {pat: abs(_amplitude(pat, outputs)) ** 2 for pat in _PATTERNS}
