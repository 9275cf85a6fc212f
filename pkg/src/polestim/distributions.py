"""Exact finite-N distributions of the maximum-likelihood estimators.

For N shots, ``theta_hat = arccos(m / N)`` with ``m = N_DBH - N_DBV``. Splitting
every shot into two independent H/V "halves" with ``P(H) = cos^2(theta/2)``
turns ``N + m`` into a Binomial(2N, cos^2(theta/2)) count, so the support is
``{arccos(m/N) : m = -N..N}``.

``delta_hat = arctan(sqrt(N_C / N_SB))`` depends on the pair ``(N_C, N_SB)``
only through the ratio ``N_C / N_SB``. Pairs are grouped by the reduced
fraction ``(N_C/g, N_SB/g)``, ``g = gcd``, which decides equality of estimator
values exactly. The outcome ``N_C = N_SB = 0`` leaves ``delta_hat`` undefined
and is booked as failure mass.

Weights are evaluated in log space with ``gammaln`` so that N in the
thousands is routine. Every distribution keeps, next to its float values,
the integer keys that generate them and an offset representation
``value = center + offset`` whose offsets are exactly antisymmetric under the
estimator's reflection symmetry. Means are accumulated on the offsets with
``math.fsum``, so biases that vanish by symmetry come out as exactly 0.0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import erfc, gammaln, xlogy

from .errors import ConsistencyError, DegenerateError, DomainError, NoDataError
from .probabilities import coarse_probs_array
from .states import HALF_PI, QUARTER_PI, ReducedParams, cos_sin

__all__ = [
    "DiscreteDistribution",
    "MomentSummary",
    "theta_distribution",
    "delta_distribution",
    "p_fail",
    "theta_distribution_bruteforce",
    "delta_distribution_bruteforce",
    "cumulative",
    "moments",
    "theta_moments",
    "delta_moments",
    "standardized_cumulative",
    "max_normal_deviation",
    "normal_cdf",
]

BRUTEFORCE_MAX_N = 60


@dataclass(frozen=True, eq=False)
class DiscreteDistribution:
    """Finite distribution of an estimator plus the mass of failed estimates.

    Attributes
    ----------
    values : ndarray
        Strictly increasing estimator values.
    probs : ndarray
        Unconditional probability of each value.
    failure_mass : float
        Probability that the estimator is undefined.
    keys : ndarray
        Integer generators of the values: ``m`` for theta_hat (shape ``(k,)``),
        the reduced pair ``(N_C, N_SB) / gcd`` for delta_hat (shape ``(k, 2)``).
    center, offsets :
        ``values == center + offsets`` up to rounding.
    """

    values: np.ndarray
    probs: np.ndarray
    failure_mass: float
    keys: np.ndarray
    center: float
    offsets: np.ndarray

    @property
    def conditional_mass(self) -> float:
        return math.fsum(self.probs)

    @property
    def total_mass(self) -> float:
        return math.fsum([*self.probs, self.failure_mass])

    def conditional_probs(self) -> np.ndarray:
        """Probabilities renormalized over the successful estimates."""
        mass = self.conditional_mass
        if mass <= 0.0:
            raise NoDataError("the estimator never succeeds")
        return self.probs / mass

    def key_tuples(self) -> list:
        if self.keys.ndim == 1:
            return [int(k) for k in self.keys]
        return [(int(a), int(b)) for a, b in self.keys]

    def as_dict(self) -> dict:
        """Map from integer key to unconditional probability."""
        return dict(zip(self.key_tuples(), (float(p) for p in self.probs)))

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class MomentSummary:
    mean: float
    bias: float
    variance: float
    normalized_variance: float


def _check_n(n) -> int:
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    return int(n)


def p_fail(theta: float, n: int) -> float:
    """Probability that N shots contain no C or SB event: ``((1 + cos^2 theta)/2)^N``."""
    n = _check_n(n)
    c, _ = cos_sin(theta)
    return ((1.0 + c * c) / 2.0) ** n


def theta_distribution(theta: float, n: int) -> DiscreteDistribution:
    n = _check_n(n)
    ch, sh = cos_sin(0.5 * theta)
    p, q = ch * ch, sh * sh
    m = np.arange(n, -n - 1, -1)  # descending m gives ascending arccos(m/n)
    k = n + m
    log_w = gammaln(2 * n + 1) - (gammaln(k + 1) + gammaln(2 * n - k + 1))
    log_w = log_w + (xlogy(k, p) + xlogy(2 * n - k, q))
    probs = np.exp(log_w)
    keep = probs > 0.0
    m = m[keep]
    ratio = m / n
    return DiscreteDistribution(
        values=np.arccos(ratio),
        probs=probs[keep],
        failure_mass=0.0,
        keys=m,
        center=HALF_PI,
        offsets=-np.arcsin(ratio),
    )


@lru_cache(maxsize=8)
def _pair_grid(n: int):
    """All ``(N_C, N_SB)`` with ``0 < N_C + N_SB <= n``, sorted by reduced key then multiplier."""
    nc, nsb = np.indices((n + 1, n + 1)).reshape(2, -1)
    mask = (nc + nsb <= n) & (nc + nsb > 0)
    nc, nsb = nc[mask], nsb[mask]
    g = np.gcd(nc, nsb)
    a, b = nc // g, nsb // g
    order = np.lexsort((g, b, a))
    nc, nsb, a, b = nc[order], nsb[order], a[order], b[order]
    new_group = np.ones(len(a), dtype=bool)
    new_group[1:] = (a[1:] != a[:-1]) | (b[1:] != b[:-1])
    starts = np.flatnonzero(new_group)
    keys = np.stack([a[starts], b[starts]], axis=1)
    # lgamma of the three multinomial factorials; the first two are added
    # before the third so that swapping N_C and N_SB is bit-exact
    log_fact = gammaln(nc + 1) + gammaln(nsb + 1)
    log_fact = log_fact + gammaln(n - nc - nsb + 1)
    for arr in (nc, nsb, keys, starts, log_fact):
        arr.setflags(write=False)
    return nc, nsb, keys, starts, log_fact


def delta_distribution(rp: ReducedParams, n: int) -> DiscreteDistribution:
    n = _check_n(n)
    p_dbh, p_dbv, p_sb, p_c = coarse_probs_array(rp.theta, rp.delta_phi)
    p_rest = p_dbh + p_dbv
    nc, nsb, keys, starts, log_fact = _pair_grid(n)
    log_w = gammaln(n + 1) - log_fact
    log_w = log_w + (xlogy(nc, p_c) + xlogy(nsb, p_sb)) + xlogy(n - nc - nsb, p_rest)
    probs = np.add.reduceat(np.exp(log_w), starts)

    a = np.sqrt(keys[:, 0].astype(float))
    b = np.sqrt(keys[:, 1].astype(float))
    values = np.arctan2(a, b)
    offsets = np.arctan2(a - b, a + b)
    order = np.argsort(values, kind="stable")
    values, offsets, probs, keys = values[order], offsets[order], probs[order], keys[order]
    if np.any(np.diff(values) <= 0.0):
        raise ConsistencyError("distinct ratios produced non-increasing estimator values")
    keep = probs > 0.0
    return DiscreteDistribution(
        values=values[keep],
        probs=probs[keep],
        failure_mass=p_fail(rp.theta, n),
        keys=keys[keep],
        center=QUARTER_PI,
        offsets=offsets[keep],
    )


@lru_cache(maxsize=BRUTEFORCE_MAX_N + 1)
def _compositions(n: int) -> np.ndarray:
    """Every ``(N_DBH, N_DBV, N_SB, N_C)`` summing to ``n``."""
    rows = [
        (i, j, k, n - i - j - k)
        for i in range(n + 1)
        for j in range(n + 1 - i)
        for k in range(n + 1 - i - j)
    ]
    out = np.array(rows, dtype=np.int64)
    out.setflags(write=False)
    return out


def _full_multinomial(rp: ReducedParams, n: int):
    n = _check_n(n)
    if n > BRUTEFORCE_MAX_N:
        raise DomainError(f"brute-force enumeration is limited to n <= {BRUTEFORCE_MAX_N}")
    counts = _compositions(n)
    probs = coarse_probs_array(rp.theta, rp.delta_phi)
    probs = probs / probs.sum()
    # log n! - sum log k_i! + sum k_i log p_i, with 0 log 0 = 0
    log_pmf = gammaln(n + 1.0) - gammaln(counts + 1.0).sum(axis=1) + xlogy(counts, probs).sum(axis=1)
    return counts, np.exp(log_pmf)


def theta_distribution_bruteforce(theta: float, n: int) -> dict[int, float]:
    """``{m: P(theta_hat = arccos(m/n))}`` by summing the full four-class multinomial."""
    counts, pmf = _full_multinomial(ReducedParams(theta, 0.0), n)
    uniq, inverse = np.unique(counts[:, 0] - counts[:, 1], return_inverse=True)
    sums = np.bincount(inverse.ravel(), weights=pmf, minlength=len(uniq))
    return {int(m): float(w) for m, w in zip(uniq, sums)}


def delta_distribution_bruteforce(rp: ReducedParams, n: int) -> tuple[dict[tuple[int, int], float], float]:
    """``({(a, b): probability}, failure_mass)`` from the full four-class multinomial.

    Values are keyed by the reduced ratio ``N_C : N_SB``.
    """
    counts, pmf = _full_multinomial(rp, n)
    n_sb, n_c = counts[:, 2], counts[:, 3]
    failed = (n_sb == 0) & (n_c == 0)
    failure = math.fsum(pmf[failed])
    n_sb, n_c, pmf = n_sb[~failed], n_c[~failed], pmf[~failed]
    g = np.gcd(n_c, n_sb)
    code = (n_c // g) * (n + 1) + n_sb // g
    uniq, inverse = np.unique(code, return_inverse=True)
    sums = np.bincount(inverse.ravel(), weights=pmf, minlength=len(uniq))
    a, b = np.divmod(uniq, n + 1)
    return {(int(x), int(y)): float(w) for x, y, w in zip(a, b, sums)}, failure


def cumulative(dist: DiscreteDistribution, threshold: float) -> float:
    """Conditional probability that a successful estimate is ``<= threshold``."""
    w = dist.conditional_probs()
    return min(1.0, math.fsum(w[dist.values <= threshold]))


def moments(dist: DiscreteDistribution, true_value: float, crb_diag: float) -> MomentSummary:
    """Mean, bias, variance and CRB-normalized variance over the successful estimates."""
    if not crb_diag > 0.0:
        raise DomainError(f"crb_diag must be positive, got {crb_diag!r}")
    w = dist.conditional_probs()
    mean_off = math.fsum(w * dist.offsets)
    variance = math.fsum(w * np.square(dist.offsets - mean_off))
    bias = (dist.center - true_value) + mean_off
    return MomentSummary(
        mean=dist.center + mean_off,
        bias=bias,
        variance=variance,
        normalized_variance=variance / crb_diag,
    )


def theta_moments(theta: float, n: int) -> MomentSummary:
    """Moments of theta_hat; the normalized variance is ``2 N var``."""
    return moments(theta_distribution(theta, n), theta, 1.0 / (2.0 * n))


def delta_moments(rp: ReducedParams, n: int) -> MomentSummary:
    """Conditional moments of delta_hat; the normalized variance is ``2 N sin^2(theta) var``."""
    _, st = cos_sin(rp.theta)
    if st == 0.0:
        raise NoDataError("delta_phi cannot be estimated at theta = 0 or pi")
    return moments(delta_distribution(rp, n), rp.delta_phi, 1.0 / (2.0 * n * st * st))


def standardized_cumulative(dist: DiscreteDistribution) -> tuple[np.ndarray, np.ndarray]:
    """Standardized support ``(x - mean) / sigma`` and the conditional CDF at each point."""
    w = dist.conditional_probs()
    mean_off = math.fsum(w * dist.offsets)
    variance = math.fsum(w * np.square(dist.offsets - mean_off))
    if not variance > 0.0:
        raise DegenerateError("a point mass cannot be standardized")
    z = (dist.offsets - mean_off) / math.sqrt(variance)
    cdf = np.minimum(np.cumsum(w), 1.0)
    cdf[-1] = 1.0
    return z, cdf


def max_normal_deviation(dist: DiscreteDistribution) -> float:
    """Kolmogorov distance between the standardized CDF and the standard normal.

    Both sides of every jump are compared, so this is the supremum over the
    whole real line.
    """
    z, cdf = standardized_cumulative(dist)
    phi = normal_cdf(z)
    before = np.concatenate([[0.0], cdf[:-1]])
    return float(max(np.max(np.abs(cdf - phi)), np.max(np.abs(before - phi))))


def normal_cdf(x):
    """Standard normal CDF, ``erfc(-x / sqrt 2) / 2``."""
    out = 0.5 * erfc(-np.asarray(x, dtype=float) / math.sqrt(2.0))
    return float(out) if np.ndim(out) == 0 else out
