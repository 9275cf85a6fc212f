"""Seeded Monte Carlo simulation of N-shot experiments.

Randomness comes from numpy's PCG64 generator (period 2**128). A
``(seed, stream)`` pair is turned into an independent generator through
``SeedSequence(seed, spawn_key=(stream,))``. Multinomial counts are drawn as
sequential conditional binomials, each by inverting the binomial CDF at one
53-bit uniform, in the fixed class order DB_H, DB_V, SB, C.

Trials are grouped in blocks of :data:`TRIAL_BLOCK`; block ``b`` draws from
stream ``b``. Blocks can therefore be simulated in any order or in parallel
and still reproduce the serial result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .distributions import theta_distribution
from .errors import DomainError
from .estimation import EventCounts
from .probabilities import coarse_probs_array
from .states import ReducedParams

__all__ = [
    "RNG_ALGORITHM",
    "TRIAL_BLOCK",
    "make_generator",
    "sample_count_batch",
    "sample_counts",
    "TrialSummary",
    "run_trials",
    "pearson_chi_square",
    "chi_square_vs_exact",
    "rng_metadata",
]

RNG_ALGORITHM = "PCG64"
TRIAL_BLOCK = 8192


def rng_metadata() -> dict:
    return {
        "rng": RNG_ALGORITHM,
        "seeding": "SeedSequence(seed, spawn_key=(stream,))",
        "numpy": np.__version__,
        "trial_block": TRIAL_BLOCK,
    }


def make_generator(seed: int, stream: int = 0) -> np.random.Generator:
    if seed < 0 or stream < 0:
        raise DomainError("seed and stream must be nonnegative")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=(int(stream),))))


def _draw(probs: np.ndarray, n: int, size: int, rng: np.random.Generator) -> np.ndarray:
    from scipy.stats import binom  # deferred: scipy.stats is slow to import

    counts = np.zeros((size, 4), dtype=np.int64)
    remaining = np.full(size, n, dtype=np.int64)
    mass_left = 1.0
    for k in range(3):
        u = rng.random(size)
        p_cond = 0.0 if mass_left <= 0.0 else min(1.0, max(0.0, probs[k] / mass_left))
        draw = binom.ppf(u, remaining, p_cond)
        draw = np.clip(np.nan_to_num(draw, nan=0.0), 0, remaining).astype(np.int64)
        counts[:, k] = draw
        remaining = remaining - draw
        mass_left -= probs[k]
    counts[:, 3] = remaining
    return counts


def sample_count_batch(rp: ReducedParams, n: int, size: int, seed: int, stream: int = 0) -> np.ndarray:
    """``size`` independent experiments of ``n`` shots as an int array ``(size, 4)``.

    Columns follow the class order DB_H, DB_V, SB, C.
    """
    if n < 1 or size < 1:
        raise DomainError("n and size must be positive")
    probs = coarse_probs_array(rp.theta, rp.delta_phi)
    return _draw(probs, int(n), int(size), make_generator(seed, stream))


def sample_counts(rp: ReducedParams, n: int, seed: int, stream: int = 0) -> EventCounts:
    return EventCounts.from_array(sample_count_batch(rp, n, 1, seed, stream)[0])


def _theta_hat(counts: np.ndarray) -> np.ndarray:
    n = counts.sum(axis=1)
    return np.arccos(np.clip((counts[:, 0] - counts[:, 1]) / n, -1.0, 1.0))


def _delta_hat(counts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    ok = (counts[:, 2] + counts[:, 3]) > 0
    c = counts[ok]
    return np.arctan2(np.sqrt(c[:, 3]), np.sqrt(c[:, 2])), ok


@dataclass
class TrialSummary:
    """Estimates from repeated N-shot experiments.

    ``estimates_delta`` only holds successful trials; ``failure_count``
    records the others.
    """

    rp: ReducedParams
    n: int
    counts: np.ndarray = field(repr=False)
    estimates_theta: np.ndarray = field(repr=False)
    estimates_delta: np.ndarray = field(repr=False)
    failure_count: int
    empirical_bias_theta: float
    empirical_variance_theta: float
    empirical_bias_delta: float
    empirical_variance_delta: float

    @property
    def trials(self) -> int:
        return len(self.estimates_theta)


def _bias_var(values: np.ndarray, truth: float) -> tuple[float, float]:
    if len(values) == 0:
        return math.nan, math.nan
    mean = math.fsum(values) / len(values)
    var = math.fsum(np.square(values - mean)) / (len(values) - 1) if len(values) > 1 else math.nan
    return mean - truth, var


def run_trials(rp: ReducedParams, n: int, trials: int, seed: int) -> TrialSummary:
    if trials < 1:
        raise DomainError("trials must be positive")
    blocks = []
    for b, start in enumerate(range(0, trials, TRIAL_BLOCK)):
        size = min(TRIAL_BLOCK, trials - start)
        blocks.append(sample_count_batch(rp, n, size, seed, stream=b))
    counts = np.concatenate(blocks)
    theta_hat = _theta_hat(counts)
    delta_hat, ok = _delta_hat(counts)
    bias_t, var_t = _bias_var(theta_hat, rp.theta)
    bias_d, var_d = _bias_var(delta_hat, rp.delta_phi)
    return TrialSummary(
        rp=rp,
        n=int(n),
        counts=counts,
        estimates_theta=theta_hat,
        estimates_delta=delta_hat,
        failure_count=int(np.count_nonzero(~ok)),
        empirical_bias_theta=bias_t,
        empirical_variance_theta=var_t,
        empirical_bias_delta=bias_d,
        empirical_variance_delta=var_d,
    )


def pearson_chi_square(observed_keys, expected_keys, expected_probs, min_expected: float = 5.0):
    """Pearson test of integer-keyed samples against an exact discrete law.

    Adjacent support points (in the given order) are pooled until each bin
    expects at least ``min_expected`` samples; an undersized tail joins the
    last bin. Samples whose key is outside the support land in the nearest
    bin by position, which can only inflate the statistic.

    Returns ``(statistic, dof, p_value)``.
    """
    from scipy.stats import chi2

    observed_keys = np.asarray(observed_keys)
    total = len(observed_keys)
    expected = total * np.asarray(expected_probs, dtype=float)
    expected_keys = np.asarray(expected_keys)

    bins = []
    acc = 0.0
    current = []
    for idx, e in enumerate(expected):
        current.append(idx)
        acc += e
        if acc >= min_expected:
            bins.append(current)
            current, acc = [], 0.0
    if current:
        if not bins:
            raise DomainError("too few samples to form two pooled bins")
        bins[-1].extend(current)
    if len(bins) < 2:
        raise DomainError("too few samples to form two pooled bins")

    bin_of = np.empty(len(expected), dtype=np.int64)
    for b, members in enumerate(bins):
        bin_of[members] = b
    order = np.argsort(expected_keys, kind="stable")
    pos = np.searchsorted(expected_keys[order], observed_keys)
    pos = np.clip(pos, 0, len(expected_keys) - 1)
    observed_bins = np.bincount(bin_of[order[pos]], minlength=len(bins))
    expected_bins = np.array([math.fsum(expected[m]) for m in bins])
    stat = float(np.sum((observed_bins - expected_bins) ** 2 / expected_bins))
    dof = len(bins) - 1
    return stat, dof, float(chi2.sf(stat, dof))


def chi_square_vs_exact(
    rp: ReducedParams,
    n: int,
    trials: int,
    seed: int,
    model: ReducedParams | None = None,
):
    """Chi-square test of sampled theta_hat against its exact finite-N law.

    Samples are drawn at ``rp``; the exact distribution is evaluated at
    ``model`` (default ``rp``). Returns ``(statistic, dof, p_value)``.
    """
    if trials < 2:
        raise DomainError("at least two trials are needed")
    summary = run_trials(rp, n, trials, seed)
    dist = theta_distribution((model or rp).theta, n)
    keys = summary.counts[:, 0] - summary.counts[:, 1]
    return pearson_chi_square(keys, dist.keys, dist.probs)
