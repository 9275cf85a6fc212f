"""Two-photon polarization estimation: probabilities, estimators, information and exact statistics."""

from .distributions import (
    DiscreteDistribution,
    MomentSummary,
    delta_distribution,
    delta_moments,
    max_normal_deviation,
    p_fail,
    standardized_cumulative,
    theta_distribution,
    theta_moments,
)
from .errors import (
    ConsistencyError,
    DegenerateError,
    DomainError,
    NoDataError,
    NotInteriorError,
    PolestimError,
    SingularError,
)
from .estimation import EstimateResult, EventCounts, estimate, mle_delta, mle_delta_shifted, mle_theta
from .information import crb, fim_event, fim_total, qfim_reduced
from .probabilities import EVENT_ORDER, CoarseEventProbs, Detector, EventClass, coarse_probs, detailed_probs
from .sampling import TrialSummary, run_trials, sample_counts
from .states import PolarizationParams, ReducedParams, reduce

__version__ = "0.1.0"

__all__ = [
    "DiscreteDistribution",
    "MomentSummary",
    "delta_distribution",
    "delta_moments",
    "max_normal_deviation",
    "p_fail",
    "standardized_cumulative",
    "theta_distribution",
    "theta_moments",
    "ConsistencyError",
    "DegenerateError",
    "DomainError",
    "NoDataError",
    "NotInteriorError",
    "PolestimError",
    "SingularError",
    "EstimateResult",
    "EventCounts",
    "estimate",
    "mle_delta",
    "mle_delta_shifted",
    "mle_theta",
    "crb",
    "fim_event",
    "fim_total",
    "qfim_reduced",
    "EVENT_ORDER",
    "CoarseEventProbs",
    "Detector",
    "EventClass",
    "coarse_probs",
    "detailed_probs",
    "TrialSummary",
    "run_trials",
    "sample_counts",
    "PolarizationParams",
    "ReducedParams",
    "reduce",
]
