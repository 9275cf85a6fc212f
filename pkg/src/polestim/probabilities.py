"""Closed-form detection probabilities.

Two photons leave the balanced beam splitter and each output port is split
by a polarizing beam splitter onto an H and a V detector. The ten possible
detector patterns collapse into four event classes:

* ``DB_H`` / ``DB_V``: both photons on one detector, both H or both V;
* ``SB``: both photons in one port, one on each of its two detectors;
* ``C``: one photon per port.

With ``p = cos^2(theta/2)`` and ``q = sin^2(theta/2)`` the class
probabilities are ``p^2``, ``q^2``, ``2pq cos^2(delta_phi)`` and
``2pq sin^2(delta_phi)``; ``2pq`` is ``sin^2(theta)/2``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError, DomainError
from .states import ReducedParams, cos_sin

__all__ = [
    "EventClass",
    "EVENT_ORDER",
    "Detector",
    "ALL_PATTERNS",
    "CoarseEventProbs",
    "coarse_probs",
    "coarse_probs_array",
    "detailed_probs",
    "detailed_probs_array",
    "classify",
    "pattern_label",
    "clamp_probability",
]

# Rounding noise tolerated before a probability outside [0, 1] is a bug.
CLAMP_TOLERANCE = 1e-12


class EventClass(enum.Enum):
    DB_H = "DB_H"
    DB_V = "DB_V"
    SB = "SB"
    C = "C"


#: Serialization and array order of the four classes.
EVENT_ORDER = (EventClass.DB_H, EventClass.DB_V, EventClass.SB, EventClass.C)


class Detector(enum.IntEnum):
    """Detectors, indexed like the output modes of :mod:`polestim.optics`."""

    H1 = 0
    V1 = 1
    H2 = 2
    V2 = 3


#: The ten detector patterns in the order of the outcome table:
#: double bunching, single bunching, then coincidences.
ALL_PATTERNS: tuple[tuple[Detector, Detector], ...] = (
    (Detector.H1, Detector.H1),
    (Detector.H2, Detector.H2),
    (Detector.V1, Detector.V1),
    (Detector.V2, Detector.V2),
    (Detector.H1, Detector.V1),
    (Detector.H2, Detector.V2),
    (Detector.H1, Detector.H2),
    (Detector.V1, Detector.V2),
    (Detector.H1, Detector.V2),
    (Detector.V1, Detector.H2),
)


def _canonical(pattern) -> tuple[Detector, Detector]:
    try:
        a, b = pattern
        a, b = Detector(a), Detector(b)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"not a detector pattern: {pattern!r}") from exc
    return (a, b) if a <= b else (b, a)


def pattern_label(pattern) -> str:
    """Lower-case column label such as ``h1v2``."""
    a, b = _canonical(pattern)
    return f"{a.name}{b.name}".lower()


def classify(pattern) -> EventClass:
    """Event class of a detector pattern (an unordered pair of detectors)."""
    a, b = _canonical(pattern)
    port_a, port_b = a // 2, b // 2
    if port_a != port_b:
        return EventClass.C
    if a != b:
        return EventClass.SB
    return EventClass.DB_H if a % 2 == 0 else EventClass.DB_V


def clamp_probability(p):
    """Clip rounding noise into [0, 1]; larger excursions raise."""
    arr = np.asarray(p, dtype=float)
    if np.any(arr < -CLAMP_TOLERANCE) or np.any(arr > 1.0 + CLAMP_TOLERANCE):
        raise ConsistencyError(f"probability outside [0, 1] beyond rounding: {p!r}")
    out = np.clip(arr, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class CoarseEventProbs:
    p_dbh: float
    p_dbv: float
    p_sb: float
    p_c: float

    def as_array(self) -> np.ndarray:
        """Probabilities in :data:`EVENT_ORDER`."""
        return np.array([self.p_dbh, self.p_dbv, self.p_sb, self.p_c])

    def __getitem__(self, event: EventClass) -> float:
        return {
            EventClass.DB_H: self.p_dbh,
            EventClass.DB_V: self.p_dbv,
            EventClass.SB: self.p_sb,
            EventClass.C: self.p_c,
        }[event]


def _half_angle_weights(theta, delta_phi):
    ch, sh = cos_sin(0.5 * np.asarray(theta, dtype=float))
    cd, sd = cos_sin(delta_phi)
    p = np.square(ch)
    q = np.square(sh)
    return p, q, np.square(cd), np.square(sd)


def coarse_probs_array(theta, delta_phi) -> np.ndarray:
    """Vectorized class probabilities; the last axis follows :data:`EVENT_ORDER`."""
    p, q, cd2, sd2 = _half_angle_weights(theta, delta_phi)
    two_pq = 2.0 * p * q
    out = np.stack(np.broadcast_arrays(p * p, q * q, two_pq * cd2, two_pq * sd2), axis=-1)
    return clamp_probability(out)


def coarse_probs(rp: ReducedParams) -> CoarseEventProbs:
    dbh, dbv, sb, c = coarse_probs_array(rp.theta, rp.delta_phi)
    return CoarseEventProbs(float(dbh), float(dbv), float(sb), float(c))


def detailed_probs_array(theta, delta_phi) -> np.ndarray:
    """Vectorized probabilities of the ten patterns, last axis in :data:`ALL_PATTERNS` order."""
    p, q, cd2, sd2 = _half_angle_weights(theta, delta_phi)
    pq = p * q
    zero = np.zeros_like(pq * cd2)
    cols = [
        0.5 * p * p,
        0.5 * p * p,
        0.5 * q * q,
        0.5 * q * q,
        pq * cd2,
        pq * cd2,
        zero,
        zero,
        pq * sd2,
        pq * sd2,
    ]
    return clamp_probability(np.stack(np.broadcast_arrays(*cols), axis=-1))


def detailed_probs(rp: ReducedParams) -> dict[tuple[Detector, Detector], float]:
    values = detailed_probs_array(rp.theta, rp.delta_phi)
    return {pat: float(v) for pat, v in zip(ALL_PATTERNS, values)}
