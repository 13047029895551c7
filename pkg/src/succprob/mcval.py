"""Monte Carlo oracle for the analytic success-probability machinery.

Two jobs live here.  First, an event-driven survival simulation with
Kaplan-Meier median extraction, to measure the spread of log(median) and
compare it against the 1/sqrt(d) and (1/log 2)/sqrt(d) theory columns.
Second, simulation-based PPoS/CP estimates that rebuild each endpoint's
remaining data on its natural scale (normal means, binomial counts, gamma
event-time totals drawn from their exact finite-sample laws) and apply the
final success rule directly, giving an estimate of the same quantity the
closed forms approximate - with a binomial standard error attached.

Per-replicate randomness comes from counter-based substreams keyed on
(seed, replicate), so any replicate is reproducible in isolation and results
do not depend on execution order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import singledispatch

import numpy as np

from . import _kernels
from .betabinom import (
    ArmInterim,
    BetaPrior,
    SuccessIndicator,
    indicator_eval,
    posterior_beta,
)
from .core import InterimSummary
from .endpoints import (
    LOG2,
    BinaryOneArm,
    BinaryTwoArm,
    ContinuousOneArm,
    ContinuousTwoArm,
    SurvivalOneArm,
    SurvivalTwoArm,
    evaluate,
    theta_prime,
    to_interim,
)
from .errors import DomainError

__all__ = [
    "KmCurve",
    "McEstimate",
    "SeResult",
    "SimConfig",
    "SurvivalDataset",
    "empirical_se_log_median",
    "km_estimate",
    "mc_ppos",
    "mc_ppos_betabinom",
    "simulate_trial",
    "variance_formulas",
]


@dataclass(frozen=True)
class SurvivalDataset:
    """Follow-up times with event flags (False = censored)."""

    fup: np.ndarray
    event: np.ndarray

    def __post_init__(self) -> None:
        fup = np.asarray(self.fup, dtype=float)
        event = np.asarray(self.event, dtype=bool)
        if fup.ndim != 1 or fup.shape != event.shape or fup.size == 0:
            raise DomainError("bad_dataset_shape",
                              "fup and event must be equal-length 1-d arrays")
        if not np.all(np.isfinite(fup)) or np.any(fup < 0):
            raise DomainError("bad_followup",
                              "follow-up times must be finite and nonnegative")
        object.__setattr__(self, "fup", fup)
        object.__setattr__(self, "event", event)


@dataclass(frozen=True)
class SimConfig:
    """One simulation scenario: N subjects followed until D events."""

    N: int
    D: int
    median: float
    ltfu_rate: float = 0.0
    M: int = 1
    seed: int = 0

    def __post_init__(self) -> None:
        for name, v in (("N", self.N), ("D", self.D), ("M", self.M)):
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or v < 1:
                raise DomainError("bad_count",
                                  f"{name} must be a positive integer, got {v!r}")
        if self.D > self.N:
            raise DomainError("count_order",
                              f"target events D={self.D} exceeds N={self.N}")
        if not (math.isfinite(self.median) and self.median > 0):
            raise DomainError("bad_scale",
                              f"median must be positive, got {self.median}")
        # a loss fraction of 1 would demand an infinite censoring rate
        if not 0 <= self.ltfu_rate < 1:
            raise DomainError("bad_ltfu_rate",
                              f"ltfu_rate must lie in [0, 1), got {self.ltfu_rate}")
        if not isinstance(self.seed, (int, np.integer)):
            raise DomainError("bad_seed", f"seed must be an integer, got {self.seed!r}")


@dataclass(frozen=True)
class KmCurve:
    """Product-limit curve sampled at the distinct event times."""

    times: np.ndarray
    surv: np.ndarray
    median: float
    defined: bool


@dataclass(frozen=True)
class SeResult:
    """Spread of log(KM median) over replicates next to both theory columns."""

    N: int
    D: int
    med: float
    sd_obs: float
    sd_1_over_sqrtd: float
    sd_log2: float
    ltfu_rate: float
    M: int
    dropped: int
    unreliable: bool

    CSV_HEADER = "N,D,med,sd_obs,sd_1_over_sqrtd,sd_log2,ltfu_rate,M"

    def csv_row(self) -> str:
        return (f"{self.N},{self.D},{self.med!r},{self.sd_obs!r},"
                f"{self.sd_1_over_sqrtd!r},{self.sd_log2!r},"
                f"{self.ltfu_rate!r},{self.M}")


@dataclass(frozen=True)
class McEstimate:
    """Success fraction with its binomial standard error."""

    value: float
    se: float
    sims: int


def _replicate_rng(seed: int, rep: int) -> np.random.Generator:
    # counter-based substream: replicate rep is reproducible on its own
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence(entropy=seed, spawn_key=(rep,))))


def _draw_raw(cfg: SimConfig, rep: int) -> tuple[np.ndarray, np.ndarray]:
    """Pre-cutoff follow-up and event flags for one replicate.

    The draw order (events first, then censoring) is part of the seed
    contract; changing it changes every dataset.
    """
    rng = _replicate_rng(cfg.seed, rep)
    rate_event = LOG2 / cfg.median
    event_t = rng.exponential(1.0 / rate_event, cfg.N)
    if cfg.ltfu_rate > 0:
        rate_censor = cfg.ltfu_rate / (1.0 - cfg.ltfu_rate) * rate_event
        censor_t = rng.exponential(1.0 / rate_censor, cfg.N)
    else:
        censor_t = np.full(cfg.N, np.inf)
    fup = np.minimum(event_t, censor_t)
    event = event_t <= censor_t
    return fup, event


def simulate_trial(cfg: SimConfig, rep: int = 0) -> SurvivalDataset:
    """One replicate, already truncated at the D-th observed event time."""
    if not isinstance(rep, (int, np.integer)) or rep < 0:
        raise DomainError("bad_replicate", f"rep must be >= 0, got {rep!r}")
    fup, event = _draw_raw(cfg, rep)
    fup2, event2 = _kernels.apply_cutoff(fup, event, cfg.D)
    return SurvivalDataset(fup=fup2, event=event2)


def km_estimate(data: SurvivalDataset) -> KmCurve:
    """Product-limit curve and its median (smallest time with S <= 1/2)."""
    if not np.any(data.event):
        raise DomainError("no_events", "median estimation needs at least one event")
    order = np.argsort(data.fup, kind="stable")
    fup = data.fup[order]
    event = data.event[order]
    n = fup.size
    times: list[float] = []
    surv: list[float] = []
    s = 1.0
    at_risk = n
    i = 0
    while i < n:
        t = fup[i]
        j = i
        deaths = 0
        while j < n and fup[j] == t:
            deaths += int(event[j])
            j += 1
        if deaths > 0:
            s *= 1.0 - deaths / at_risk
            times.append(float(t))
            surv.append(s)
        at_risk -= j - i
        i = j
    arr_t = np.asarray(times)
    arr_s = np.asarray(surv)
    crossed = arr_s <= 0.5 + 1e-12
    if np.any(crossed):
        return KmCurve(arr_t, arr_s, float(arr_t[np.argmax(crossed)]), True)
    return KmCurve(arr_t, arr_s, math.nan, False)


def empirical_se_log_median(cfg: SimConfig) -> SeResult:
    """SD of log(KM median) over cfg.M replicates of the event-driven design."""
    if cfg.M < 2:
        raise DomainError("too_few_replicates",
                          "the SD over replicates needs M >= 2")
    fup = np.empty((cfg.M, cfg.N))
    event = np.empty((cfg.M, cfg.N), dtype=bool)
    for r in range(cfg.M):
        fup[r], event[r] = _draw_raw(cfg, r)
    logs = _kernels.batch_log_median(fup, event, cfg.D)
    kept = logs[~np.isnan(logs)]
    dropped = int(cfg.M - kept.size)
    if kept.size < 2:
        raise DomainError("too_few_replicates",
                          f"only {kept.size} replicates had a defined median")
    return SeResult(
        N=cfg.N, D=cfg.D, med=cfg.median,
        sd_obs=float(np.std(kept, ddof=1)),
        sd_1_over_sqrtd=1.0 / math.sqrt(cfg.D),
        sd_log2=(1.0 / LOG2) / math.sqrt(cfg.D),
        ltfu_rate=cfg.ltfu_rate, M=cfg.M,
        dropped=dropped,
        unreliable=dropped > 0.1 * cfg.M,
    )


def variance_formulas(distribution: str, estimator: str, d: int,
                      beta: float | None = None) -> float:
    """Closed-form variance of log(median estimate) after d events."""
    if not isinstance(d, (int, np.integer)) or isinstance(d, bool) or d < 1:
        raise DomainError("bad_count", f"d must be a positive integer, got {d!r}")
    if distribution == "exponential":
        if estimator == "mle":
            return 1.0 / d
        if estimator == "sample_median":
            return (1.0 / d) * (1.0 / LOG2) ** 2
        raise DomainError("bad_estimator",
                          f"exponential estimator must be 'mle' or "
                          f"'sample_median', got {estimator!r}")
    if distribution == "weibull":
        if estimator != "sample_median":
            raise DomainError("bad_estimator",
                              "only the sample-median variance is available "
                              "for weibull")
        if beta is None or not (math.isfinite(beta) and beta > 0):
            raise DomainError("bad_weibull_shape",
                              f"weibull needs a positive shape, got {beta}")
        return (1.0 / d) * (1.0 / beta**2) * (1.0 / LOG2) ** 2
    raise DomainError("bad_distribution",
                      f"distribution must be 'exponential' or 'weibull', "
                      f"got {distribution!r}")


# --- natural-scale PPoS / CP oracle ---------------------------------------


def _dir(alternative: str) -> float:
    return 1.0 if alternative == "greater" else -1.0


@singledispatch
def _simulate_final(cell, interim: InterimSummary, theta: np.ndarray,
                    alternative: str, rng: np.random.Generator) -> np.ndarray:
    raise DomainError("bad_endpoint_cell",
                      f"no simulator for {type(cell).__name__}")


@_simulate_final.register
def _(cell: ContinuousOneArm, interim, theta, alternative, rng):
    d = _dir(alternative)
    n_rem = cell.N - cell.n
    mu_true = cell.null_value + d * theta
    xbar_rem = rng.normal(mu_true, cell.s / math.sqrt(n_rem))
    theta_rem = d * (xbar_rem - cell.null_value)
    return interim.t * interim.theta_hat + (1 - interim.t) * theta_rem


@_simulate_final.register
def _(cell: ContinuousTwoArm, interim, theta, alternative, rng):
    d = _dir(alternative)
    n_rem = cell.N - cell.n
    delta_true = cell.null_value + d * theta
    r = cell.a.r
    delta_rem = rng.normal(delta_true, r * cell.s / math.sqrt(n_rem))
    theta_rem = d * (delta_rem - cell.null_value)
    return interim.t * interim.theta_hat + (1 - interim.t) * theta_rem


@_simulate_final.register
def _(cell: BinaryOneArm, interim, theta, alternative, rng):
    d = _dir(alternative)
    n_rem = cell.N - cell.n
    p_true = np.clip(cell.null_value + d * theta, 1e-12, 1 - 1e-12)
    x_rem = rng.binomial(n_rem, p_true)
    p_final = (cell.p * cell.n + x_rem) / cell.N
    return d * (p_final - cell.null_value)


@_simulate_final.register
def _(cell: BinaryTwoArm, interim, theta, alternative, rng):
    if cell.n_t is None:
        raise DomainError("mc_needs_counts",
                          "the simulation oracle needs per-arm counts, not a "
                          "difference/stderr summary")
    d = _dir(alternative)
    frac_t = cell.a.a / (cell.a.a + 1.0)
    n_t_final = int(round(frac_t * cell.N))
    n_c_final = cell.N - n_t_final
    m_t, m_c = n_t_final - cell.n_t, n_c_final - cell.n_c
    if m_t < 1 or m_c < 1:
        raise DomainError("count_order", "both arms need remaining subjects")
    # the drawn effect moves the treatment rate; control stays at its estimate
    delta_true = cell.null_value + d * theta
    p_c_true = cell.p_c
    p_t_true = np.clip(p_c_true + delta_true, 1e-12, 1 - 1e-12)
    x_t = rng.binomial(m_t, p_t_true)
    x_c = rng.binomial(m_c, np.full_like(theta, p_c_true))
    p_t_final = (cell.p_t * cell.n_t + x_t) / n_t_final
    p_c_final = (cell.p_c * cell.n_c + x_c) / n_c_final
    return d * (p_t_final - p_c_final - cell.null_value)


@_simulate_final.register
def _(cell: SurvivalOneArm, interim, theta, alternative, rng):
    if cell.xi != 1.0:
        raise DomainError("mc_estimator_unsupported",
                          "the simulation oracle covers the exponential-MLE "
                          "median (xi = 1) only")
    d = _dir(alternative)
    d_rem = cell.D - cell.d
    med_true = cell.null_value * np.exp(d * theta)
    rate = LOG2 / med_true
    # mean of d_rem exponential times, drawn from its exact gamma law
    mean_t = rng.gamma(d_rem, 1.0 / (rate * d_rem))
    med_rem = LOG2 * mean_t
    theta_rem = d * np.log(med_rem / cell.null_value)
    return interim.t * interim.theta_hat + (1 - interim.t) * theta_rem


@_simulate_final.register
def _(cell: SurvivalTwoArm, interim, theta, alternative, rng):
    d = _dir(alternative)
    d_rem = cell.D - cell.d
    d_t = d_rem // 2
    d_c = d_rem - d_t
    hr_true = cell.null_value * np.exp(d * theta)
    rate_c = LOG2 / 12.0  # baseline hazard; the ratio is scale-free
    rate_t = hr_true * rate_c
    mean_t = rng.gamma(d_t, 1.0 / (rate_t * d_t))
    mean_c = rng.gamma(d_c, 1.0 / (rate_c * d_c), size=theta.shape)
    hr_rem = mean_c / mean_t
    theta_rem = d * np.log(hr_rem / cell.null_value)
    return interim.t * interim.theta_hat + (1 - interim.t) * theta_rem


def mc_ppos(cell, alternative: str = "greater", succ_crit: str = "trial",
            z_crit_final: float | None = None,
            clinical_threshold: float | None = None,
            measure: str = "ppos", expected: float | None = None,
            prior_location: float | None = None,
            prior_sd: float | None = None,
            prior_events: float | None = None,
            sims: int = 200_000, seed: int = 0) -> McEstimate:
    """Simulation estimate of PPoS (or CP with measure='cp').

    Draws the effect from the posterior implied by the interim data (flat
    prior unless one is given), rebuilds the remaining data on the natural
    scale, applies the final success rule, and returns the success fraction
    with its binomial standard error.
    """
    if not isinstance(sims, (int, np.integer)) or sims < 1000:
        raise DomainError("too_few_sims", f"sims must be >= 1000, got {sims}")
    if measure not in ("ppos", "cp"):
        raise DomainError("bad_measure",
                          f"measure must be 'ppos' or 'cp', got {measure!r}")
    bundle = evaluate(cell, alternative=alternative, succ_crit=succ_crit,
                      z_crit_final=z_crit_final,
                      clinical_threshold=clinical_threshold,
                      expected=expected, prior_location=prior_location,
                      prior_sd=prior_sd, prior_events=prior_events)
    interim = bundle.interim
    rng = np.random.Generator(np.random.Philox(
        np.random.SeedSequence(entropy=seed)))
    if measure == "cp":
        if expected is None:
            raise DomainError("missing_expected", "cp needs an expected value")
        theta = np.full(sims, theta_prime(cell, expected, alternative))
    elif bundle.posterior is not None:
        post = bundle.posterior
        theta = (np.full(sims, post.mean) if post.sd == 0.0
                 else rng.normal(post.mean, post.sd, sims))
    else:
        theta = rng.normal(interim.theta_hat,
                           interim.k / math.sqrt(interim.t), sims)
    final = _simulate_final(cell, interim, theta, alternative, rng)
    hits = final > bundle.gamma * interim.k
    value = float(np.mean(hits))
    return McEstimate(value=value,
                      se=math.sqrt(value * (1.0 - value) / sims), sims=sims)


def mc_ppos_betabinom(prior_t: BetaPrior, prior_c: BetaPrior,
                      arm_t: ArmInterim, arm_c: ArmInterim,
                      indicator: SuccessIndicator, sims: int = 200_000,
                      seed: int = 0) -> McEstimate:
    """Simulation counterpart of the exact two-arm beta-binomial sum."""
    if not isinstance(sims, (int, np.integer)) or sims < 1000:
        raise DomainError("too_few_sims", f"sims must be >= 1000, got {sims}")
    post_t = posterior_beta(prior_t, arm_t)
    post_c = posterior_beta(prior_c, arm_c)
    rng = np.random.Generator(np.random.Philox(
        np.random.SeedSequence(entropy=seed)))
    pi_t = rng.beta(post_t.a, post_t.b, sims)
    pi_c = rng.beta(post_c.a, post_c.b, sims)
    x_t = arm_t.x + rng.binomial(arm_t.remaining, pi_t)
    x_c = arm_c.x + rng.binomial(arm_c.remaining, pi_c)
    # one verdict per distinct final cell, then a lattice lookup
    verdict = {}
    hits = np.empty(sims, dtype=bool)
    for i in range(sims):
        key = (int(x_t[i]), int(x_c[i]))
        got = verdict.get(key)
        if got is None:
            got = indicator_eval(indicator, key[0], arm_t.N, key[1], arm_c.N)
            verdict[key] = got
        hits[i] = got
    value = float(np.mean(hits))
    return McEstimate(value=value,
                      se=math.sqrt(value * (1.0 - value) / sims), sims=sims)
