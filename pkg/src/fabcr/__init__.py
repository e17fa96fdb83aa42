"""Bayes-assisted confidence regions with exact frequentist coverage.

Confidence regions for a normal mean (and natural exponential family means)
built by inverting likelihood-ratio acceptance regions under a marginal
likelihood, so that regions are shortest near a chosen focal point while
keeping exact coverage everywhere. Bounded-influence priors (horseshoe,
beta-prime, Laplace, flat-plus-atom) give regions that revert to the standard
interval far from the focal point.
"""

from fabcr._core import BACKEND
from fabcr.priors import PriorModel, TailProfile, parse_prior
from fabcr.gaussian import (
    AcceptanceInterval,
    ConfidenceRegion,
    acceptance_interval,
    confidence_region,
    focal_point,
    p_value_curve,
    weight,
)
from fabcr.asymptotics import (
    LimitInterval,
    focal_drift,
    g_alpha,
    g_alpha_inv,
    limit_interval,
)
from fabcr.nef import (
    DiscreteAcceptanceSet,
    NefModel,
    acceptance_set,
    confidence_region_nef,
    parse_family,
)
from fabcr.regression import (
    RegressionProblem,
    all_marginal_regions,
    combo_region,
    fit_regression,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "PriorModel",
    "TailProfile",
    "parse_prior",
    "AcceptanceInterval",
    "ConfidenceRegion",
    "acceptance_interval",
    "confidence_region",
    "focal_point",
    "p_value_curve",
    "weight",
    "LimitInterval",
    "focal_drift",
    "g_alpha",
    "g_alpha_inv",
    "limit_interval",
    "DiscreteAcceptanceSet",
    "NefModel",
    "acceptance_set",
    "confidence_region_nef",
    "parse_family",
    "RegressionProblem",
    "all_marginal_regions",
    "combo_region",
    "fit_regression",
    "__version__",
]
