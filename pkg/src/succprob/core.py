"""Success-probability engine on the standardized effect scale.

Every endpoint type reduces an interim look to three numbers: the estimated
effect ``theta_hat`` (oriented so that larger is better), the standard error
``k`` the estimate will have at the final analysis, and the information
fraction ``t``.  On that scale the interim z-statistic is
``z = theta_hat * sqrt(t) / k`` and the trial succeeds once the final
z-statistic clears a resolved threshold ``gamma``: either the final critical
value itself or a clinically relevant effect expressed in units of ``k``.

All probability measures below condition on the interim data and differ only
in what they assume about the effect over the remainder of the trial: a fixed
value (conditional power), the interim trend, or a posterior distribution
(predictive power).  The design-stage measure integrates the success region
over the prior alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError
from .numerics import std_normal_cdf

__all__ = [
    "InterimSummary",
    "NormalPrior",
    "SuccessCriterion",
    "NormalDist",
    "b_value",
    "resolve_gamma",
    "psi",
    "cp_specified",
    "cp_interim_trend",
    "ppos_no_prior",
    "ppos_with_prior",
    "pos",
    "posterior",
    "predictive_final",
]

_T_EPS = 1e-9


@dataclass(frozen=True)
class InterimSummary:
    """Interim look on the standardized scale.

    Parameters
    ----------
    theta_hat : float
        Effect estimate at the interim, oriented so larger is better.
    k : float
        Standard error the effect estimate will have at the final analysis;
        must be positive.
    t : float
        Information fraction in (0, 1).  Values within 1e-9 of the endpoints
        are nudged inside to keep the formulas finite.
    """

    theta_hat: float
    k: float
    t: float

    def __post_init__(self):
        if not (math.isfinite(self.theta_hat) and math.isfinite(self.k)
                and math.isfinite(self.t)):
            raise DomainError("nonfinite_input", "interim summary must be finite")
        if self.k <= 0.0:
            raise DomainError("k_nonpositive", "final-analysis standard error k must be positive")
        if not 0.0 < self.t < 1.0:
            raise DomainError("t_out_of_range",
                              "information fraction t must lie strictly between 0 and 1")
        object.__setattr__(self, "t", min(max(self.t, _T_EPS), 1.0 - _T_EPS))

    @property
    def z(self) -> float:
        """Interim z-statistic."""
        return self.theta_hat * math.sqrt(self.t) / self.k

    @property
    def b(self) -> float:
        """Interim B-value, z scaled back by the square root of information."""
        return self.z * math.sqrt(self.t)


@dataclass(frozen=True)
class NormalPrior:
    """Normal prior on the effect: mean ``theta0``, standard deviation ``sigma0``.

    ``sigma0 = 0`` encodes a point-mass prior at ``theta0``.
    """

    theta0: float
    sigma0: float

    def __post_init__(self):
        if not (math.isfinite(self.theta0) and math.isfinite(self.sigma0)):
            raise DomainError("nonfinite_input", "prior parameters must be finite")
        if self.sigma0 < 0.0:
            raise DomainError("sigma0_negative",
                              "prior standard deviation sigma0 must be nonnegative")


@dataclass(frozen=True)
class NormalDist:
    """A normal law by mean and standard deviation; ``sd = 0`` is a point mass."""

    mean: float
    sd: float

    def __post_init__(self):
        if self.sd < 0.0:
            raise DomainError("sd_negative", "standard deviation must be nonnegative")


@dataclass(frozen=True)
class SuccessCriterion:
    """What counts as success at the final analysis.

    ``kind="trial"`` succeeds when the final z-statistic exceeds the critical
    value ``c1``; ``kind="clinical"`` succeeds when the final effect estimate
    exceeds ``theta_min``.  Both reduce to a threshold gamma on the final
    z-statistic via :func:`resolve_gamma`.
    """

    kind: str
    c1: float | None = None
    theta_min: float | None = None

    def __post_init__(self):
        if self.kind not in ("trial", "clinical"):
            raise DomainError("bad_criterion_kind",
                              "success criterion kind must be 'trial' or 'clinical'")
        if self.kind == "trial" and (self.c1 is None or not math.isfinite(self.c1)):
            raise DomainError("missing_c1",
                              "trial success needs the final critical value c1")
        if self.kind == "clinical" and (self.theta_min is None
                                        or not math.isfinite(self.theta_min)):
            raise DomainError("missing_theta_min",
                              "clinical success needs the minimum effect theta_min")


def b_value(z: float, t: float) -> float:
    """B-value at information fraction t for interim z-statistic z."""
    if not 0.0 < t <= 1.0:
        raise DomainError("t_out_of_range",
                          "information fraction t must lie in (0, 1]")
    return z * math.sqrt(t)


def resolve_gamma(criterion: SuccessCriterion, k: float) -> float:
    """Threshold on the final z-statistic implied by a success criterion.

    For clinical success the threshold is ``theta_min / k``, so it depends on
    the standard error scale ``k`` in force at the final analysis.
    """
    if criterion.kind == "trial":
        return float(criterion.c1)
    if k <= 0.0:
        raise DomainError("k_nonpositive", "final-analysis standard error k must be positive")
    return float(criterion.theta_min) / k


def psi(k: float, t: float, prior: NormalPrior) -> float:
    """Posterior weight on the interim estimate.

    ``psi = sigma0^2 / (sigma0^2 + k^2 / t)`` rises from 0 (point-mass prior)
    to 1 (flat prior) as the prior variance grows against the interim
    sampling variance.
    """
    if k <= 0.0 or not 0.0 < t < 1.0:
        raise DomainError("bad_scale", "need k > 0 and 0 < t < 1")
    if prior.sigma0 == 0.0:
        return 0.0
    v0 = prior.sigma0 ** 2
    return v0 / (v0 + k * k / t)


def cp_specified(interim: InterimSummary, theta_prime: float, gamma: float) -> float:
    """Conditional power assuming the effect equals ``theta_prime`` from now on.

    The remaining-data success threshold is combined with the specified drift
    in a form that stays well defined when the interim estimate is zero.
    """
    t, k = interim.t, interim.k
    arg = ((t * interim.theta_hat + (1.0 - t) * theta_prime) / k - gamma) \
        / math.sqrt(1.0 - t)
    return float(std_normal_cdf(arg))


def cp_interim_trend(interim: InterimSummary, gamma: float) -> float:
    """Conditional power assuming the interim trend continues."""
    t = interim.t
    arg = (interim.z / math.sqrt(t) - gamma) / math.sqrt(1.0 - t)
    return float(std_normal_cdf(arg))


def ppos_no_prior(interim: InterimSummary, gamma: float) -> float:
    """Predictive probability of success under a flat prior on the effect.

    Equals conditional power on the interim trend shrunk toward 1/2 by the
    factor sqrt(t) on the normal-quantile scale.
    """
    t = interim.t
    arg = math.sqrt(t) * (interim.z / math.sqrt(t) - gamma) / math.sqrt(1.0 - t)
    return float(std_normal_cdf(arg))


def ppos_with_prior(interim: InterimSummary, prior: NormalPrior, gamma: float) -> float:
    """Predictive probability of success under a normal prior on the effect.

    Averages conditional power over the posterior given the interim data.
    With a point-mass prior the interim estimate no longer moves the effect,
    so only the success cutoff retains interim information.
    """
    t, k = interim.t, interim.k
    w = psi(k, t, prior)
    threshold = k / (1.0 - t) * (gamma - math.sqrt(t) * interim.z)
    mean = w * interim.theta_hat + (1.0 - w) * prior.theta0
    sd = k * math.sqrt(1.0 / (1.0 - t) + w / t)
    return float(std_normal_cdf(-(threshold - mean) / sd))


def pos(prior: NormalPrior, k_tilde: float, gamma: float) -> float:
    """Design-stage probability of success before any data.

    ``k_tilde`` is the anticipated standard error of the effect estimate at
    the final analysis; the success region on the final estimate is averaged
    over the prior.
    """
    if k_tilde <= 0.0:
        raise DomainError("k_nonpositive",
                          "anticipated final standard error must be positive")
    num = prior.theta0 - k_tilde * gamma
    den = math.sqrt(prior.sigma0 ** 2 + k_tilde ** 2)
    return float(std_normal_cdf(num / den))


def posterior(interim: InterimSummary, prior: NormalPrior) -> NormalDist:
    """Posterior law of the effect given the interim data.

    A point-mass prior returns a point mass at the prior mean.
    """
    t, k = interim.t, interim.k
    w = psi(k, t, prior)
    mean = w * interim.theta_hat + (1.0 - w) * prior.theta0
    sd = k * math.sqrt(w / t)
    return NormalDist(mean, sd)


def predictive_final(interim: InterimSummary,
                     prior: NormalPrior | None = None) -> NormalDist:
    """Predictive law of the final effect estimate given the interim.

    With no prior the effect is fixed at the interim estimate over the
    remaining information.  Success at the final analysis is the event
    ``estimate > gamma * k``, so tail probabilities of this law reproduce
    the predictive probabilities of success.
    """
    t, k = interim.t, interim.k
    if prior is None:
        w = 1.0
        m = interim.theta_hat
    else:
        w = psi(k, t, prior)
        m = w * interim.theta_hat + (1.0 - w) * prior.theta0
    mean = t * interim.theta_hat + (1.0 - t) * m
    sd = (1.0 - t) * k * math.sqrt(1.0 / (1.0 - t) + w / t)
    return NormalDist(mean, sd)
