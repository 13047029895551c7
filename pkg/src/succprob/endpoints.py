"""Adapters from raw trial quantities to the standardized (theta_hat, k, t) scale.

Six cells are covered: continuous, binary, and time-to-event endpoints, each
in one- and two-arm flavors.  The core engine only ever sees the "greater"
orientation; a ``less`` alternative sign-flips the estimate, anticipated
effects, priors, and clinical thresholds on the way in, with survival cells
working on the log scale of medians or hazard ratios.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import singledispatch

import numpy as np

from .core import (
    InterimSummary,
    NormalDist,
    NormalPrior,
    SuccessCriterion,
    cp_interim_trend,
    cp_specified,
    pos,
    posterior,
    ppos_no_prior,
    ppos_with_prior,
    predictive_final,
    psi,
    resolve_gamma,
)
from .errors import DomainError

__all__ = [
    "AllocationRatio",
    "ContinuousOneArm",
    "ContinuousTwoArm",
    "BinaryOneArm",
    "BinaryTwoArm",
    "SurvivalOneArm",
    "SurvivalTwoArm",
    "DesignSpec",
    "ResultBundle",
    "DesignResult",
    "CurveTable",
    "DensityTable",
    "xi_factor",
    "to_interim",
    "theta_prime",
    "prior_to_theta",
    "design_k",
    "evaluate",
    "design_pos",
    "curve",
    "density_table",
]

LOG2 = math.log(2.0)


def _direction(alternative: str) -> float:
    if alternative == "greater":
        return 1.0
    if alternative == "less":
        return -1.0
    raise DomainError("bad_alternative", "alternative must be 'greater' or 'less'")


def _check_counts(small: int, big: int, what: str):
    if not (isinstance(small, (int, np.integer)) and isinstance(big, (int, np.integer))):
        raise DomainError("count_not_integer", f"{what} counts must be integers")
    if not 0 < small < big:
        raise DomainError("count_order",
                          f"{what}: interim count must satisfy 0 < interim < final")


@dataclass(frozen=True)
class AllocationRatio:
    """Treatment:control allocation a:1 with the derived factor r² = (a+1)²/a."""

    a: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.a) and self.a > 0):
            raise DomainError("bad_allocation", "allocation ratio a must be positive")

    @property
    def r2(self) -> float:
        return (self.a + 1.0) ** 2 / self.a

    @property
    def r(self) -> float:
        return math.sqrt(self.r2)


def _alloc(a) -> AllocationRatio:
    return a if isinstance(a, AllocationRatio) else AllocationRatio(float(a))


def xi_factor(estimator: str, beta: float | None = None,
              value: float | None = None) -> float:
    """Variance factor for the log median of a single-arm survival interim.

    ``mle_exponential`` fits an exponential rate (factor 1), the sample-median
    estimators inflate the variance by 1/log2 (exponential) or 1/(beta*log2)
    (Weibull with shape ``beta``); ``custom`` passes ``value`` through.
    """
    if estimator == "mle_exponential":
        return 1.0
    if estimator == "sample_median_exponential":
        return 1.0 / LOG2
    if estimator == "sample_median_weibull":
        if beta is None or not beta > 0:
            raise DomainError("bad_weibull_shape", "Weibull shape beta must be positive")
        return 1.0 / (beta * LOG2)
    if estimator == "custom":
        if value is None or not value > 0:
            raise DomainError("bad_xi", "custom variance factor must be positive")
        return float(value)
    raise DomainError("bad_estimator",
                      "estimator must be one of mle_exponential, "
                      "sample_median_exponential, sample_median_weibull, custom")


@dataclass(frozen=True)
class ContinuousOneArm:
    """Single-arm continuous endpoint: interim mean and SD against a null mean."""

    xbar: float
    s: float
    n: int
    N: int
    null_value: float = 0.0

    def __post_init__(self):
        _check_counts(self.n, self.N, "subjects")
        if not self.s > 0:
            raise DomainError("sd_nonpositive", "interim SD must be positive")


@dataclass(frozen=True)
class ContinuousTwoArm:
    """Two-arm continuous endpoint: interim mean difference and pooled SD."""

    delta: float
    s: float
    n: int
    N: int
    a: AllocationRatio | float = 1.0
    null_value: float = 0.0

    def __post_init__(self):
        _check_counts(self.n, self.N, "subjects")
        if not self.s > 0:
            raise DomainError("sd_nonpositive", "pooled interim SD must be positive")
        object.__setattr__(self, "a", _alloc(self.a))


@dataclass(frozen=True)
class BinaryOneArm:
    """Single-arm binary endpoint: interim response proportion."""

    p: float
    n: int
    N: int
    null_value: float = 0.0

    def __post_init__(self):
        _check_counts(self.n, self.N, "subjects")
        if not 0.0 < self.p < 1.0:
            raise DomainError("degenerate_proportion",
                              "interim proportion must lie strictly between 0 and 1; "
                              "an exact beta-binomial calculation handles boundary data")


@dataclass(frozen=True)
class BinaryTwoArm:
    """Two-arm binary endpoint.

    Give either per-arm interim results (``p_t``, ``n_t``, ``p_c``, ``n_c``),
    from which the difference and its unpooled standard error are derived, or
    the difference ``delta`` with its standard error ``stderr`` directly (in
    which case ``n`` is required).
    """

    N: int
    a: AllocationRatio | float = 1.0
    null_value: float = 0.0
    p_t: float | None = None
    n_t: int | None = None
    p_c: float | None = None
    n_c: int | None = None
    delta: float | None = None
    stderr: float | None = None
    n: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "a", _alloc(self.a))
        counts = [self.p_t, self.n_t, self.p_c, self.n_c]
        direct = [self.delta, self.stderr]
        if all(v is not None for v in counts):
            if any(v is not None for v in direct):
                raise DomainError("ambiguous_interim",
                                  "give per-arm results or (delta, stderr), not both")
            for p, who in ((self.p_t, "treatment"), (self.p_c, "control")):
                if not 0.0 < p < 1.0:
                    raise DomainError(
                        "degenerate_proportion",
                        f"{who} interim proportion must lie strictly between 0 and 1; "
                        "an exact beta-binomial calculation handles boundary data")
            if self.n_t <= 0 or self.n_c <= 0:
                raise DomainError("count_order", "per-arm interim counts must be positive")
            if self.n is not None and self.n != self.n_t + self.n_c:
                raise DomainError("count_mismatch",
                                  "n must equal n_t + n_c when both are given")
            object.__setattr__(self, "n", int(self.n_t + self.n_c))
            se = math.sqrt(self.p_t * (1 - self.p_t) / self.n_t
                           + self.p_c * (1 - self.p_c) / self.n_c)
            object.__setattr__(self, "delta", self.p_t - self.p_c)
            object.__setattr__(self, "stderr", se)
        elif all(v is not None for v in direct):
            if any(v is not None for v in counts):
                raise DomainError("ambiguous_interim",
                                  "give per-arm results or (delta, stderr), not both")
            if self.n is None:
                raise DomainError("missing_n",
                                  "interim total n is required with (delta, stderr)")
            if not self.stderr > 0:
                raise DomainError("stderr_nonpositive",
                                  "interim standard error must be positive")
        else:
            raise DomainError("incomplete_interim",
                              "need (p_t, n_t, p_c, n_c) or (delta, stderr, n)")
        _check_counts(self.n, self.N, "subjects")


@dataclass(frozen=True)
class SurvivalOneArm:
    """Single-arm time-to-event endpoint: interim median against a null median.

    ``xi`` is the variance factor of the log median estimator, see
    :func:`xi_factor`.
    """

    median: float
    d: int
    D: int
    null_value: float
    xi: float = 1.0

    def __post_init__(self):
        _check_counts(self.d, self.D, "events")
        if not self.median > 0:
            raise DomainError("median_nonpositive", "interim median must be positive")
        if not self.null_value > 0:
            raise DomainError("median_nonpositive", "null median must be positive")
        if not self.xi > 0:
            raise DomainError("bad_xi", "variance factor xi must be positive")


@dataclass(frozen=True)
class SurvivalTwoArm:
    """Two-arm time-to-event endpoint: interim hazard ratio (treatment/control)."""

    hr: float
    d: int
    D: int
    a: AllocationRatio | float = 1.0
    null_value: float = 1.0

    def __post_init__(self):
        _check_counts(self.d, self.D, "events")
        if not self.hr > 0:
            raise DomainError("hr_nonpositive", "interim hazard ratio must be positive")
        if not self.null_value > 0:
            raise DomainError("hr_nonpositive", "null hazard ratio must be positive")
        object.__setattr__(self, "a", _alloc(self.a))


EndpointCell = (ContinuousOneArm | ContinuousTwoArm | BinaryOneArm | BinaryTwoArm
                | SurvivalOneArm | SurvivalTwoArm)


# --- interim mapping ---------------------------------------------------------

@singledispatch
def to_interim(cell, alternative: str = "greater") -> InterimSummary:
    """Map an endpoint cell to the standardized (theta_hat, k, t) summary."""
    raise DomainError("bad_cell", f"unsupported endpoint cell {type(cell).__name__}")


@to_interim.register
def _(cell: ContinuousOneArm, alternative: str = "greater") -> InterimSummary:
    sign = _direction(alternative)
    return InterimSummary(theta_hat=sign * (cell.xbar - cell.null_value),
                          k=cell.s / math.sqrt(cell.N),
                          t=cell.n / cell.N)


@to_interim.register
def _(cell: ContinuousTwoArm, alternative: str = "greater") -> InterimSummary:
    sign = _direction(alternative)
    return InterimSummary(theta_hat=sign * (cell.delta - cell.null_value),
                          k=cell.a.r * cell.s / math.sqrt(cell.N),
                          t=cell.n / cell.N)


@to_interim.register
def _(cell: BinaryOneArm, alternative: str = "greater") -> InterimSummary:
    sign = _direction(alternative)
    s = math.sqrt(cell.p * (1.0 - cell.p))
    return InterimSummary(theta_hat=sign * (cell.p - cell.null_value),
                          k=s / math.sqrt(cell.N),
                          t=cell.n / cell.N)


@to_interim.register
def _(cell: BinaryTwoArm, alternative: str = "greater") -> InterimSummary:
    sign = _direction(alternative)
    t = cell.n / cell.N
    return InterimSummary(theta_hat=sign * (cell.delta - cell.null_value),
                          k=cell.stderr * math.sqrt(t),
                          t=t)


@to_interim.register
def _(cell: SurvivalOneArm, alternative: str = "greater") -> InterimSummary:
    sign = _direction(alternative)
    return InterimSummary(theta_hat=sign * math.log(cell.median / cell.null_value),
                          k=cell.xi / math.sqrt(cell.D),
                          t=cell.d / cell.D)


@to_interim.register
def _(cell: SurvivalTwoArm, alternative: str = "greater") -> InterimSummary:
    sign = _direction(alternative)
    return InterimSummary(theta_hat=sign * math.log(cell.hr / cell.null_value),
                          k=cell.a.r / math.sqrt(cell.D),
                          t=cell.d / cell.D)


def _is_log_scale(cell) -> bool:
    return isinstance(cell, (SurvivalOneArm, SurvivalTwoArm))


def theta_prime(cell: EndpointCell, value: float, alternative: str = "greater") -> float:
    """Map a natural-scale effect (mean/difference/proportion/median/HR) to
    the standardized theta scale, oriented by the alternative."""
    sign = _direction(alternative)
    if _is_log_scale(cell):
        if not value > 0:
            raise DomainError("value_nonpositive",
                              "median or hazard ratio must be positive")
        return sign * math.log(value / cell.null_value)
    return sign * (value - cell.null_value)


def natural_scale(cell: EndpointCell, theta: float, alternative: str = "greater") -> float:
    """Inverse of :func:`theta_prime`: standardized effect back to the natural scale."""
    sign = _direction(alternative)
    if _is_log_scale(cell):
        return cell.null_value * math.exp(sign * theta)
    return cell.null_value + sign * theta


def prior_to_theta(cell: EndpointCell, location: float,
                   sd: float | None = None, events: int | None = None,
                   alternative: str = "greater") -> NormalPrior:
    """Build the standardized normal prior from natural-scale prior inputs.

    For survival cells the prior lives on the log scale; its spread comes
    either from ``sd`` directly or from the event count of a prior study
    (two-arm: 2/sqrt(events), assuming 1:1 allocation there; one-arm:
    xi/sqrt(events)).
    """
    theta0 = theta_prime(cell, location, alternative)
    if sd is not None:
        if sd < 0:
            raise DomainError("sigma0_negative", "prior SD must be nonnegative")
        return NormalPrior(theta0, float(sd))
    if _is_log_scale(cell) and events is not None:
        if events <= 0:
            raise DomainError("bad_prior_events", "prior event count must be positive")
        scale = cell.xi if isinstance(cell, SurvivalOneArm) else 2.0
        return NormalPrior(theta0, scale / math.sqrt(events))
    raise DomainError("incomplete_prior",
                      "prior needs an SD (or, for survival, a prior event count)")


# --- design stage ------------------------------------------------------------

@dataclass(frozen=True)
class DesignSpec:
    """Design-stage description used for the probability of success.

    The anticipated nuisance scale is endpoint-specific: ``sd_exp`` for
    continuous endpoints, anticipated proportions for binary ones, ``xi`` for
    single-arm survival (two-arm survival needs none).  ``se_exp`` overrides
    the derived standard error directly.  The prior is on the natural effect
    scale, as in :func:`prior_to_theta`.
    """

    endpoint: str
    arms: int
    alternative: str = "greater"
    null_value: float | None = None
    N: int | None = None
    D: int | None = None
    a: AllocationRatio | float = 1.0
    sd_exp: float | None = None
    prop_exp: float | None = None
    prop_t_exp: float | None = None
    prop_c_exp: float | None = None
    xi: float = 1.0
    se_exp: float | None = None
    succ_crit: str = "trial"
    z_crit_final: float | None = None
    clinical_threshold: float | None = None
    prior_location: float | None = None
    prior_sd: float | None = None
    prior_events: int | None = None

    def __post_init__(self):
        if self.endpoint not in ("continuous", "binary", "survival"):
            raise DomainError("bad_endpoint",
                              "endpoint must be continuous, binary, or survival")
        if self.arms not in (1, 2):
            raise DomainError("bad_arms", "arms must be 1 or 2")
        _direction(self.alternative)
        object.__setattr__(self, "a", _alloc(self.a))
        if self.null_value is None:
            object.__setattr__(self, "null_value",
                               1.0 if self.endpoint == "survival" else 0.0)
        if self.endpoint == "survival":
            if self.D is None or self.D <= 0:
                raise DomainError("missing_events", "survival design needs D > 0")
            if not self.null_value > 0:
                raise DomainError("hr_nonpositive", "survival null value must be positive")
        else:
            if self.N is None or self.N <= 0:
                raise DomainError("missing_samples", "design needs N > 0")
        if self.succ_crit == "trial":
            if self.z_crit_final is None:
                raise DomainError("missing_c1",
                                  "trial success needs the final critical value")
        elif self.succ_crit == "clinical":
            if self.clinical_threshold is None:
                raise DomainError("missing_theta_min",
                                  "clinical success needs a threshold")
        else:
            raise DomainError("bad_criterion_kind",
                              "success criterion kind must be 'trial' or 'clinical'")
        if self.prior_location is None:
            raise DomainError("incomplete_prior", "design needs a prior location")

    def _pseudo_cell(self):
        # a minimal stand-in so the natural-scale maps can be reused
        if self.endpoint == "survival" and self.arms == 1:
            return SurvivalOneArm(median=1.0, d=1, D=max(self.D, 2),
                                  null_value=self.null_value, xi=self.xi)
        if self.endpoint == "survival":
            return SurvivalTwoArm(hr=1.0, d=1, D=max(self.D, 2), a=self.a,
                                  null_value=self.null_value)
        if self.arms == 1 and self.endpoint == "continuous":
            return ContinuousOneArm(xbar=0.0, s=1.0, n=1, N=max(self.N, 2),
                                    null_value=self.null_value)
        if self.arms == 1:
            return BinaryOneArm(p=0.5, n=1, N=max(self.N, 2),
                                null_value=self.null_value)
        if self.endpoint == "continuous":
            return ContinuousTwoArm(delta=0.0, s=1.0, n=1, N=max(self.N, 2),
                                    a=self.a, null_value=self.null_value)
        return BinaryTwoArm(N=max(self.N, 2), a=self.a, null_value=self.null_value,
                            delta=0.0, stderr=1.0, n=1)


def design_k(design: DesignSpec) -> float:
    """Anticipated standard error of the effect estimate at the final analysis."""
    if design.se_exp is not None:
        if not design.se_exp > 0:
            raise DomainError("stderr_nonpositive", "anticipated SE must be positive")
        return float(design.se_exp)
    if design.endpoint == "survival":
        scale = design.xi if design.arms == 1 else design.a.r
        return scale / math.sqrt(design.D)
    if design.endpoint == "continuous":
        if design.sd_exp is None or not design.sd_exp > 0:
            raise DomainError("sd_nonpositive",
                              "continuous design needs a positive anticipated SD")
        sigma = design.sd_exp
    elif design.arms == 1:
        if design.prop_exp is None or not 0 < design.prop_exp < 1:
            raise DomainError("degenerate_proportion",
                              "anticipated proportion must lie strictly in (0,1)")
        sigma = math.sqrt(design.prop_exp * (1 - design.prop_exp))
    else:
        pt, pc = design.prop_t_exp, design.prop_c_exp
        if pt is None or pc is None or not (0 < pt < 1 and 0 < pc < 1):
            raise DomainError("degenerate_proportion",
                              "anticipated per-arm proportions must lie strictly in (0,1)")
        a = design.a.a
        sigma = math.sqrt(a / (a + 1) * (pt * (1 - pt) / a + pc * (1 - pc)))
    r = 1.0 if design.arms == 1 else design.a.r
    return r * sigma / math.sqrt(design.N)


@dataclass(frozen=True)
class DesignResult:
    """Design-stage probability of success with its resolved internals."""

    pos: float
    gamma: float
    k_tilde: float
    prior: NormalPrior

    def as_dict(self) -> dict:
        return {
            "pos": self.pos,
            "gamma": self.gamma,
            "k_tilde": self.k_tilde,
            "prior": {"theta0": self.prior.theta0, "sigma0": self.prior.sigma0},
        }


def design_pos(design: DesignSpec) -> DesignResult:
    """Probability of success at the design stage, prior only."""
    k_tilde = design_k(design)
    cell = design._pseudo_cell()
    prior = prior_to_theta(cell, design.prior_location, sd=design.prior_sd,
                           events=design.prior_events, alternative=design.alternative)
    if design.succ_crit == "trial":
        criterion = SuccessCriterion("trial", c1=design.z_crit_final)
    else:
        theta_min = theta_prime(cell, design.clinical_threshold, design.alternative)
        criterion = SuccessCriterion("clinical", theta_min=theta_min)
    gamma = resolve_gamma(criterion, k_tilde)
    return DesignResult(pos=pos(prior, k_tilde, gamma), gamma=gamma,
                        k_tilde=k_tilde, prior=prior)


# --- one-call interim facade -------------------------------------------------

@dataclass(frozen=True)
class ResultBundle:
    """All interim measures computed from one standardized summary."""

    interim: InterimSummary
    gamma: float
    cp_trend: float
    ppos_no_prior: float
    predictive_no_prior: NormalDist
    cp_specified: float | None = None
    ppos_with_prior: float | None = None
    psi: float | None = None
    posterior: NormalDist | None = None
    predictive_with_prior: NormalDist | None = None

    def as_dict(self) -> dict:
        def dist(d):
            return None if d is None else {"mean": d.mean, "sd": d.sd}

        return {
            "theta_hat": self.interim.theta_hat,
            "k": self.interim.k,
            "t": self.interim.t,
            "z": self.interim.z,
            "b": self.interim.b,
            "gamma": self.gamma,
            "psi": self.psi,
            "cp_trend": self.cp_trend,
            "cp_specified": self.cp_specified,
            "ppos_no_prior": self.ppos_no_prior,
            "ppos_with_prior": self.ppos_with_prior,
            "posterior": dist(self.posterior),
            "predictive_no_prior": dist(self.predictive_no_prior),
            "predictive_with_prior": dist(self.predictive_with_prior),
        }


def _criterion_for(cell, succ_crit: str, z_crit_final, clinical_threshold,
                   alternative: str) -> SuccessCriterion:
    if succ_crit == "trial":
        return SuccessCriterion("trial", c1=z_crit_final)
    if succ_crit == "clinical":
        if clinical_threshold is None:
            raise DomainError("missing_theta_min", "clinical success needs a threshold")
        return SuccessCriterion(
            "clinical", theta_min=theta_prime(cell, clinical_threshold, alternative))
    raise DomainError("bad_criterion_kind",
                      "success criterion kind must be 'trial' or 'clinical'")


def evaluate(cell: EndpointCell, alternative: str = "greater",
             succ_crit: str = "trial", z_crit_final: float | None = None,
             clinical_threshold: float | None = None,
             expected: float | None = None,
             prior_location: float | None = None,
             prior_sd: float | None = None,
             prior_events: int | None = None) -> ResultBundle:
    """Compute every applicable success measure for one interim look.

    ``expected`` is the anticipated post-interim effect on the natural scale;
    the prior is given on the natural scale as well.  Measures whose inputs
    are absent come back as None.
    """
    interim = to_interim(cell, alternative)
    criterion = _criterion_for(cell, succ_crit, z_crit_final, clinical_threshold,
                               alternative)
    gamma = resolve_gamma(criterion, interim.k)

    bundle = {
        "interim": interim,
        "gamma": gamma,
        "cp_trend": cp_interim_trend(interim, gamma),
        "ppos_no_prior": ppos_no_prior(interim, gamma),
        "predictive_no_prior": predictive_final(interim),
    }
    if expected is not None:
        bundle["cp_specified"] = cp_specified(
            interim, theta_prime(cell, expected, alternative), gamma)
    if prior_location is not None:
        prior = prior_to_theta(cell, prior_location, sd=prior_sd,
                               events=prior_events, alternative=alternative)
        bundle["ppos_with_prior"] = ppos_with_prior(interim, prior, gamma)
        bundle["psi"] = psi(interim.k, interim.t, prior)
        bundle["posterior"] = posterior(interim, prior)
        bundle["predictive_with_prior"] = predictive_final(interim, prior)
    return ResultBundle(**bundle)


# --- sweeps and densities ----------------------------------------------------

def _replace_estimate(cell: EndpointCell, value: float) -> EndpointCell:
    if isinstance(cell, ContinuousOneArm):
        return ContinuousOneArm(value, cell.s, cell.n, cell.N, cell.null_value)
    if isinstance(cell, ContinuousTwoArm):
        return ContinuousTwoArm(value, cell.s, cell.n, cell.N, cell.a, cell.null_value)
    if isinstance(cell, BinaryOneArm):
        return BinaryOneArm(value, cell.n, cell.N, cell.null_value)
    if isinstance(cell, BinaryTwoArm):
        # sweep the difference holding the observed standard error fixed
        return BinaryTwoArm(N=cell.N, a=cell.a, null_value=cell.null_value,
                            delta=value, stderr=cell.stderr, n=cell.n)
    if isinstance(cell, SurvivalOneArm):
        return SurvivalOneArm(value, cell.d, cell.D, cell.null_value, cell.xi)
    return SurvivalTwoArm(value, cell.d, cell.D, cell.a, cell.null_value)


def observed_estimate(cell: EndpointCell) -> float:
    """The cell's own interim estimate on its natural scale."""
    if isinstance(cell, ContinuousOneArm):
        return cell.xbar
    if isinstance(cell, (ContinuousTwoArm, BinaryTwoArm)):
        return cell.delta
    if isinstance(cell, BinaryOneArm):
        return cell.p
    if isinstance(cell, SurvivalOneArm):
        return cell.median
    return cell.hr


@dataclass(frozen=True)
class CurveTable:
    """Success measures swept over hypothetical interim estimates."""

    estimate: list[float]
    cp_trend: list[float]
    ppos_no_prior: list[float]
    ppos_with_prior: list[float] | None
    crossing: float
    observed: float
    gamma: float

    def as_dict(self) -> dict:
        return {
            "estimate": self.estimate,
            "cp_trend": self.cp_trend,
            "ppos_no_prior": self.ppos_no_prior,
            "ppos_with_prior": self.ppos_with_prior,
            "crossing": self.crossing,
            "observed": self.observed,
            "gamma": self.gamma,
        }


def curve(cell: EndpointCell, alternative: str = "greater",
          succ_crit: str = "trial", z_crit_final: float | None = None,
          clinical_threshold: float | None = None,
          prior_location: float | None = None,
          prior_sd: float | None = None,
          prior_events: int | None = None,
          lo: float | None = None, hi: float | None = None,
          points: int = 101) -> CurveTable:
    """Sweep the interim estimate and tabulate CP and PPoS.

    The grid always contains the observed estimate and the crossing value
    where conditional power and predictive probability both equal 1/2.
    """
    if points < 2:
        raise DomainError("bad_grid", "curve needs at least 2 grid points")
    interim = to_interim(cell, alternative)
    criterion = _criterion_for(cell, succ_crit, z_crit_final, clinical_threshold,
                               alternative)
    gamma = resolve_gamma(criterion, interim.k)
    crossing = natural_scale(cell, gamma * interim.k, alternative)
    observed = observed_estimate(cell)

    if lo is None or hi is None:
        # span 4 interim standard errors around the observed estimate
        se_theta = interim.k / math.sqrt(interim.t)
        lo_t, hi_t = interim.theta_hat - 4 * se_theta, interim.theta_hat + 4 * se_theta
        nat = sorted((natural_scale(cell, lo_t, alternative),
                      natural_scale(cell, hi_t, alternative)))
        lo = nat[0] if lo is None else lo
        hi = nat[1] if hi is None else hi
    if not hi > lo:
        raise DomainError("bad_grid", "curve needs hi > lo")

    grid = set(np.linspace(lo, hi, points).tolist())
    grid.add(observed)
    grid.add(crossing)
    if _is_log_scale(cell):
        grid = {g for g in grid if g > 0}
    xs = sorted(grid)

    prior = None
    if prior_location is not None:
        prior = prior_to_theta(cell, prior_location, sd=prior_sd,
                               events=prior_events, alternative=alternative)
    cp_vals, pp_vals, ppp_vals = [], [], []
    for x in xs:
        s = to_interim(_replace_estimate(cell, x), alternative)
        cp_vals.append(cp_interim_trend(s, gamma))
        pp_vals.append(ppos_no_prior(s, gamma))
        if prior is not None:
            ppp_vals.append(ppos_with_prior(s, prior, gamma))
    return CurveTable(estimate=xs, cp_trend=cp_vals, ppos_no_prior=pp_vals,
                      ppos_with_prior=ppp_vals if prior is not None else None,
                      crossing=crossing, observed=observed, gamma=gamma)


@dataclass(frozen=True)
class DensityTable:
    """Predictive density of the final estimate on the natural scale."""

    x: list[float]
    no_prior: list[float]
    with_prior: list[float] | None
    observed: float

    def as_dict(self) -> dict:
        return {
            "x": self.x,
            "no_prior": self.no_prior,
            "with_prior": self.with_prior,
            "observed": self.observed,
        }


def density_table(cell: EndpointCell, alternative: str = "greater",
                  prior_location: float | None = None,
                  prior_sd: float | None = None,
                  prior_events: int | None = None,
                  points: int = 401, span: float = 6.0) -> DensityTable:
    """Tabulate the predictive density of the final estimate.

    Densities are expressed on the natural scale of the endpoint (a change
    of variables handles log-scale survival effects), so each table
    integrates to 1.
    """
    if points < 3:
        raise DomainError("bad_grid", "density table needs at least 3 points")
    interim = to_interim(cell, alternative)
    laws = [predictive_final(interim)]
    prior = None
    if prior_location is not None:
        prior = prior_to_theta(cell, prior_location, sd=prior_sd,
                               events=prior_events, alternative=alternative)
        laws.append(predictive_final(interim, prior))
    lo = min(law.mean - span * law.sd for law in laws)
    hi = max(law.mean + span * law.sd for law in laws)
    thetas = np.linspace(lo, hi, points)

    sign = _direction(alternative)
    if _is_log_scale(cell):
        xs = cell.null_value * np.exp(sign * thetas)
        jac = np.abs(xs)  # |d natural / d theta|
    else:
        xs = cell.null_value + sign * thetas
        jac = np.ones_like(xs)

    def dens(law: NormalDist) -> np.ndarray:
        z = (thetas - law.mean) / law.sd
        return np.exp(-0.5 * z * z) / (law.sd * math.sqrt(2 * math.pi)) / jac

    no_prior = dens(laws[0])
    with_prior = dens(laws[1]) if prior is not None else None
    order = np.argsort(xs)
    return DensityTable(
        x=xs[order].tolist(),
        no_prior=no_prior[order].tolist(),
        with_prior=with_prior[order].tolist() if with_prior is not None else None,
        observed=observed_estimate(cell))
