"""Polarization parameters and single-photon qubit states.

Each photon enters the beam splitter in the pure polarization state

    cos(theta/2) |H> + sin(theta/2) exp(i phi) |V>

with a common polar angle ``theta`` and its own phase ``phi``. Only the polar
angle and the half phase difference ``delta_phi = |phi1 - phi2| / 2`` are
visible in the detector statistics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

TWO_PI = 2.0 * math.pi
HALF_PI = 0.5 * math.pi
QUARTER_PI = 0.25 * math.pi

__all__ = [
    "PolarizationParams",
    "ReducedParams",
    "QubitAmplitudes",
    "cos_sin",
    "reduce",
    "reduce_full",
    "amplitudes",
    "apply_phase_shift",
    "bloch_vector",
]


def cos_sin(x):
    """Cosine and sine that are exact at the floats nearest to k*pi/4.

    ``np.cos(np.pi / 2)`` is 6e-17 rather than 0, and ``sin(pi/4)`` and
    ``cos(pi/4)`` differ by one ulp. Snapping those points restores the
    symmetries the estimator distributions rely on (for instance P_C == P_SB
    at delta_phi = pi/4), so that biases that vanish analytically vanish in
    floating point too. Works on scalars and arrays.
    """
    x = np.asarray(x, dtype=float)
    c = np.cos(x)
    s = np.sin(x)
    k = np.rint(x / QUARTER_PI)
    hit = (k * QUARTER_PI == x) & np.isfinite(x)
    if np.any(hit):
        kk = np.mod(k[hit].astype(np.int64), 8)
        r = math.sqrt(0.5)
        cos_table = np.array([1.0, r, 0.0, -r, -1.0, -r, 0.0, r])
        sin_table = np.array([0.0, r, 1.0, r, 0.0, -r, -1.0, -r])
        c = np.array(c, copy=True)
        s = np.array(s, copy=True)
        c[hit] = cos_table[kk]
        s[hit] = sin_table[kk]
    if c.ndim == 0:
        return float(c), float(s)
    return c, s


def _check_theta(theta: float) -> None:
    if not (0.0 <= theta <= math.pi):
        raise DomainError(f"theta must lie in [0, pi], got {theta!r}")


@dataclass(frozen=True)
class PolarizationParams:
    """Full parameter set ``(theta, phi1, phi2)``; phases are reduced mod 2*pi."""

    theta: float
    phi1: float = 0.0
    phi2: float = 0.0

    def __post_init__(self):
        _check_theta(self.theta)
        for name in ("phi1", "phi2"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise DomainError(f"{name} must be finite, got {value!r}")
            wrapped = math.fmod(value, TWO_PI) % TWO_PI
            object.__setattr__(self, name, 0.0 if wrapped == TWO_PI else wrapped)


@dataclass(frozen=True)
class ReducedParams:
    """The identifiable pair ``(theta, delta_phi)`` with delta_phi in [0, pi/2]."""

    theta: float
    delta_phi: float

    def __post_init__(self):
        _check_theta(self.theta)
        if not (0.0 <= self.delta_phi <= HALF_PI):
            raise DomainError(f"delta_phi must lie in [0, pi/2], got {self.delta_phi!r}")

    @classmethod
    def from_phases(cls, theta: float, phi1: float, phi2: float) -> "ReducedParams":
        return reduce(PolarizationParams(theta, phi1, phi2))


@dataclass(frozen=True)
class QubitAmplitudes:
    amp_h: complex
    amp_v: complex

    def as_array(self) -> np.ndarray:
        return np.array([self.amp_h, self.amp_v], dtype=complex)


def reduce(params: PolarizationParams) -> ReducedParams:
    """Map ``(theta, phi1, phi2)`` to ``(theta, delta_phi)``.

    The raw half difference lies in [0, pi); it is folded into [0, pi/2] with
    ``d -> min(d, pi - d)``, which leaves sin^2 and cos^2 of it unchanged.
    """
    d = 0.5 * abs(params.phi1 - params.phi2)
    d = min(d, math.pi - d)
    return ReducedParams(params.theta, min(max(d, 0.0), HALF_PI))


def reduce_full(params: PolarizationParams) -> tuple[float, float, float]:
    """Return ``(theta, m_phi, delta_phi)`` with the unfolded half difference.

    ``m_phi`` is the mean phase. This is the coordinate system of the
    three-parameter Jacobian in :mod:`polestim.information`.
    """
    m_phi = 0.5 * (params.phi1 + params.phi2)
    delta = 0.5 * abs(params.phi1 - params.phi2)
    return params.theta, m_phi, delta


def amplitudes(theta: float, phi: float) -> QubitAmplitudes:
    _check_theta(theta)
    c, s = cos_sin(0.5 * theta)
    cp, sp = cos_sin(phi)
    return QubitAmplitudes(complex(c, 0.0), complex(s * cp, s * sp))


def apply_phase_shift(params: PolarizationParams, epsilon: float) -> PolarizationParams:
    """Phase gate on the second photon: ``phi2 -> (phi2 + epsilon) mod 2*pi``."""
    return PolarizationParams(params.theta, params.phi1, params.phi2 + epsilon)


def bloch_vector(theta: float, phi: float) -> np.ndarray:
    _check_theta(theta)
    ct, st = cos_sin(theta)
    cp, sp = cos_sin(phi)
    return np.array([st * cp, st * sp, ct])
