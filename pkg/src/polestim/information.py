"""Classical and quantum Fisher information, and Cramér-Rao bounds.

Parameter order is ``(theta, delta_phi)`` for 2x2 matrices, and
``(theta, phi1, phi2)`` or ``(theta, m_phi, delta_phi)`` for 3x3 ones.
"""

from __future__ import annotations

import numpy as np

from .errors import DegenerateError, DomainError, SingularError
from .probabilities import EVENT_ORDER, EventClass, coarse_probs_array
from .states import HALF_PI, ReducedParams, cos_sin

__all__ = [
    "qfim_single_state",
    "qfim_three_param",
    "jacobian_reparam",
    "qfim_reparam",
    "qfim_reduced",
    "fim_event",
    "fim_total",
    "fim_finite_difference",
    "crb",
]


def qfim_single_state(theta: float) -> np.ndarray:
    """QFIM of one pure polarization qubit in ``(theta, phi)``."""
    _, s = cos_sin(theta)
    return np.diag([1.0, s * s])


def qfim_three_param(theta: float) -> np.ndarray:
    """QFIM of the product input state in ``(theta, phi1, phi2)``.

    Information from the two photons adds: theta is shared, each phase
    belongs to one photon.
    """
    _, s = cos_sin(theta)
    return np.diag([2.0, s * s, s * s])


def jacobian_reparam(sign: int) -> tuple[np.ndarray, np.ndarray]:
    """Jacobian of ``(theta, phi1, phi2) -> (theta, m_phi, delta_phi)`` and its inverse.

    ``sign`` is ``sgn(phi1 - phi2)``, needed because delta_phi carries an
    absolute value.
    """
    if sign not in (1, -1):
        raise DegenerateError(f"sign must be +1 or -1, got {sign!r}")
    s = float(sign)
    inverse = np.array([[1.0, 0.0, 0.0], [0.0, s, s], [0.0, s, -s]])
    jac = 0.5 * np.array([[2.0, 0.0, 0.0], [0.0, s, s], [0.0, s, -s]])
    return jac, inverse


def qfim_reparam(theta: float, sign: int) -> np.ndarray:
    """QFIM in ``(theta, m_phi, delta_phi)`` via ``(J^-1)^T H J^-1``."""
    _, inverse = jacobian_reparam(sign)
    return inverse.T @ qfim_three_param(theta) @ inverse


def qfim_reduced(theta: float) -> np.ndarray:
    """QFIM for ``(theta, delta_phi)``: ``2 diag(1, sin^2 theta)``."""
    _, s = cos_sin(theta)
    return np.diag([2.0, 2.0 * s * s])


def fim_event(event: EventClass, rp: ReducedParams) -> np.ndarray:
    """Contribution ``(grad P)(grad P)^T / P`` of one event class.

    Evaluated through its simplified trigonometric form, which is the
    continuous extension at points where the class probability vanishes.
    """
    ct, st = cos_sin(rp.theta)
    cd, sd = cos_sin(rp.delta_phi)
    if event in (EventClass.DB_H, EventClass.DB_V):
        return np.array([[st * st, 0.0], [0.0, 0.0]])
    # sin(2t) sin(2d) / 4 == st*ct*sd*cd
    cross = st * ct * sd * cd
    if event is EventClass.SB:
        return 2.0 * np.array([[ct * ct * cd * cd, -cross], [-cross, st * st * sd * sd]])
    if event is EventClass.C:
        return 2.0 * np.array([[ct * ct * sd * sd, cross], [cross, st * st * cd * cd]])
    raise DomainError(f"unknown event class {event!r}")


def fim_total(rp: ReducedParams) -> np.ndarray:
    total = np.zeros((2, 2))
    for event in EVENT_ORDER:
        total = total + fim_event(event, rp)
    return total


def fim_finite_difference(rp: ReducedParams, step: float = 1e-5, min_prob: float = 1e-9) -> np.ndarray:
    """FIM from central differences of the four class probabilities.

    Classes with probability at or below ``min_prob`` are skipped.
    """
    if not step > 0.0:
        raise DomainError(f"step must be positive, got {step!r}")
    t, d = rp.theta, rp.delta_phi
    if t - step < 0.0 or t + step > np.pi or d - step < 0.0 or d + step > HALF_PI:
        raise DomainError("finite-difference stencil leaves the parameter domain")
    p0 = coarse_probs_array(t, d)
    dp_dt = (coarse_probs_array(t + step, d) - coarse_probs_array(t - step, d)) / (2.0 * step)
    dp_dd = (coarse_probs_array(t, d + step) - coarse_probs_array(t, d - step)) / (2.0 * step)
    fim = np.zeros((2, 2))
    for k in range(4):
        if p0[k] <= min_prob:
            continue
        g = np.array([dp_dt[k], dp_dd[k]])
        fim += np.outer(g, g) / p0[k]
    return fim


def crb(rp: ReducedParams, n: int) -> np.ndarray:
    """Cramér-Rao covariance bound ``F^-1 / N`` for ``n`` shots."""
    if n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    _, st = cos_sin(rp.theta)
    if st == 0.0:
        raise SingularError("delta_phi is not identifiable at theta = 0 or pi")
    return np.diag([1.0 / (2.0 * n), 1.0 / (2.0 * n * st * st)])
