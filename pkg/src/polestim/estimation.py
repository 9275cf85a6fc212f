"""Maximum-likelihood estimation of ``(theta, delta_phi)`` from event counts.

The estimators have closed forms::

    theta_hat = arccos((N_DBH - N_DBV) / N)
    delta_hat = arctan(sqrt(N_C / N_SB))

``delta_hat`` is undefined when no C or SB event was recorded; this is
reported as ``None`` rather than raised, since failures are part of the
finite-sample statistics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import xlogy

from .errors import DomainError, NotInteriorError
from .probabilities import coarse_probs_array
from .states import ReducedParams

__all__ = [
    "EventCounts",
    "EstimateResult",
    "mle_theta",
    "mle_delta",
    "mle_delta_shifted",
    "log_likelihood",
    "hessian_at_mle",
    "estimate",
]


@dataclass(frozen=True)
class EventCounts:
    n_dbh: int
    n_dbv: int
    n_sb: int
    n_c: int

    def __post_init__(self):
        for name in ("n_dbh", "n_dbv", "n_sb", "n_c"):
            value = getattr(self, name)
            if int(value) != value or value < 0:
                raise DomainError(f"{name} must be a nonnegative integer, got {value!r}")
            object.__setattr__(self, name, int(value))

    @property
    def n_total(self) -> int:
        return self.n_dbh + self.n_dbv + self.n_sb + self.n_c

    def as_array(self) -> np.ndarray:
        return np.array([self.n_dbh, self.n_dbv, self.n_sb, self.n_c], dtype=np.int64)

    @classmethod
    def from_array(cls, counts) -> "EventCounts":
        dbh, dbv, sb, c = (int(x) for x in counts)
        return cls(dbh, dbv, sb, c)


@dataclass(frozen=True)
class EstimateResult:
    theta_hat: float
    delta_hat: Optional[float]
    hessian_ok: bool
    hessian: Optional[np.ndarray] = None

    @property
    def failed(self) -> bool:
        return self.delta_hat is None


def _require_shots(counts: EventCounts) -> None:
    if counts.n_total < 1:
        raise DomainError("at least one recorded event is required")


def mle_theta(counts: EventCounts) -> float:
    _require_shots(counts)
    x = (counts.n_dbh - counts.n_dbv) / counts.n_total
    return math.acos(min(1.0, max(-1.0, x)))


def mle_delta(counts: EventCounts) -> Optional[float]:
    """Estimate of delta_phi, or ``None`` when ``N_SB = N_C = 0``.

    ``N_SB = 0`` with ``N_C > 0`` gives pi/2, the limit of the arctangent.
    """
    _require_shots(counts)
    if counts.n_sb == 0 and counts.n_c == 0:
        return None
    # atan2 covers N_SB = 0 and is exactly antisymmetric under N_C <-> N_SB
    return math.atan2(math.sqrt(counts.n_c), math.sqrt(counts.n_sb))


def mle_delta_shifted(counts: EventCounts, epsilon: float) -> Optional[float]:
    """Estimate after a phase gate ``epsilon`` on the second photon.

    Returns ``mle_delta(counts) + epsilon / 2`` with no folding; pick
    ``epsilon`` so that ``delta_phi - epsilon/2`` is close to pi/4.
    """
    delta = mle_delta(counts)
    if delta is None:
        return None
    return delta + 0.5 * epsilon


def log_likelihood(rp: ReducedParams, counts: EventCounts) -> float:
    """Multinomial log-likelihood without the combinatorial constant.

    Classes with zero counts contribute nothing; a positive count on a
    zero-probability class gives ``-inf``.
    """
    probs = coarse_probs_array(rp.theta, rp.delta_phi)
    n = counts.as_array()
    if np.any((probs == 0.0) & (n > 0)):
        return -math.inf
    return float(np.sum(xlogy(n, probs)))


def hessian_at_mle(counts: EventCounts) -> np.ndarray:
    """Hessian of :func:`log_likelihood` at the interior stationary point.

    The likelihood separates in theta and delta_phi, so the matrix is
    diagonal. Differentiating twice and substituting
    ``cos(theta) = (N_DBH - N_DBV)/N`` and ``tan^2(delta) = N_C/N_SB`` gives
    ``-2N`` and ``-4(N_C + N_SB)``.

    Raises
    ------
    NotInteriorError
        If either estimate lies on the boundary of its range (theta_hat in
        {0, pi}, or delta_hat in {0, pi/2} or undefined).
    """
    _require_shots(counts)
    n = counts.n_total
    if abs(counts.n_dbh - counts.n_dbv) >= n:
        raise NotInteriorError("theta estimate is at a pole")
    if counts.n_c == 0 or counts.n_sb == 0:
        raise NotInteriorError("delta_phi estimate is at 0, pi/2 or undefined")
    return np.diag([-2.0 * n, -4.0 * (counts.n_c + counts.n_sb)])


def estimate(counts: EventCounts) -> EstimateResult:
    theta = mle_theta(counts)
    delta = mle_delta(counts)
    try:
        hess = hessian_at_mle(counts)
    except NotInteriorError:
        return EstimateResult(theta, delta, False, None)
    return EstimateResult(theta, delta, bool(np.all(np.diag(hess) < 0)), hess)
