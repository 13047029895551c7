"""Exact predictive probability of success for binary endpoints with beta priors.

Interim responder counts update a beta prior; the number of responders among
the not-yet-observed subjects then follows a beta-binomial predictive law.
PPoS is the exact (finite) sum of that law over the outcomes a chosen success
indicator accepts: an approximate Z test, Fisher's exact test, an exact
binomial test, or a clinical threshold on the final estimate.

No normal approximation is used anywhere in this module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .numerics import (
    exact_binom_test,
    fisher_exact_one_sided,
    log_beta,
    log_choose,
    std_normal_quantile,
)

__all__ = [
    "ArmInterim",
    "BetaPrior",
    "PposResult",
    "SuccessIndicator",
    "beta_binom_pmf",
    "indicator_eval",
    "posterior_beta",
    "ppos_one_arm",
    "ppos_two_arm",
    "predictive_pmf",
]

_TAILS = ("greater", "less")


@dataclass(frozen=True)
class BetaPrior:
    """Beta(a, b) prior on a response probability."""

    a: float
    b: float

    def __post_init__(self) -> None:
        for v in (self.a, self.b):
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise DomainError("beta_prior_nonpositive",
                                  f"beta prior needs a > 0 and b > 0, got "
                                  f"a={self.a}, b={self.b}")


@dataclass(frozen=True)
class ArmInterim:
    """Interim state of one arm: x responders of n observed, N planned."""

    n: int
    x: int
    N: int

    def __post_init__(self) -> None:
        for name, v in (("n", self.n), ("x", self.x), ("N", self.N)):
            # bool is an int subclass; reject it explicitly
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
                raise DomainError("count_not_integer",
                                  f"{name} must be an integer, got {v!r}")
        if not 0 <= self.x <= self.n <= self.N:
            raise DomainError("count_order",
                              f"need 0 <= x <= n <= N, got x={self.x}, "
                              f"n={self.n}, N={self.N}")

    @property
    def remaining(self) -> int:
        return self.N - self.n


@dataclass(frozen=True)
class SuccessIndicator:
    """Success rule applied to the final (end-of-trial) counts.

    kind 'z_test': approximate Z test on the final proportion(s).  The
    default applies a continuity correction (half a lattice step, clamped so
    it never flips the sign), which is what standard proportion tests do;
    plain and pooled-SE variants are selectable.  One-arm use needs p0.
    Zero-variance final data fall back to the matching exact test and the
    event is counted on the returned PposResult.

    kind 'fisher_exact': one-sided Fisher test on the final 2x2 table
    (two-arm only).

    kind 'exact_binomial': one-sided exact binomial test against p0
    (one-arm only).

    kind 'clinical_threshold': compares the final estimate to a threshold;
    a target rate pi_min counts when attained (>= / <=), a difference margin
    delta_min must be strictly exceeded.  In a two-arm setting pi_min applies
    to the treatment arm's final rate and ignores the control arm.
    """

    kind: str
    level: float | None = None
    tail: str = "greater"
    pooled: bool = False
    continuity: bool = True
    p0: float | None = None
    pi_min: float | None = None
    delta_min: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("z_test", "fisher_exact", "exact_binomial",
                             "clinical_threshold"):
            raise DomainError("bad_indicator_kind",
                              f"unknown success indicator kind {self.kind!r}")
        if self.tail not in _TAILS:
            raise DomainError("bad_alternative",
                              f"tail must be 'greater' or 'less', got "
                              f"{self.tail!r}")
        if self.kind == "clinical_threshold":
            if (self.pi_min is None) == (self.delta_min is None):
                raise DomainError("threshold_ambiguous",
                                  "clinical_threshold takes exactly one of "
                                  "pi_min (one-arm) or delta_min (two-arm)")
            if self.pi_min is not None and not 0 < self.pi_min < 1:
                raise DomainError("threshold_out_of_range",
                                  f"pi_min must lie in (0, 1), got {self.pi_min}")
            if self.delta_min is not None and not -1 < self.delta_min < 1:
                raise DomainError("threshold_out_of_range",
                                  f"delta_min must lie in (-1, 1), got "
                                  f"{self.delta_min}")
            return
        if self.level is None or not 0 < self.level < 1:
            raise DomainError("level_out_of_range",
                              f"{self.kind} needs a level in (0, 1), got "
                              f"{self.level}")
        if self.kind == "exact_binomial" and self.p0 is None:
            raise DomainError("missing_p0", "exact_binomial needs p0")
        if self.p0 is not None and not 0 < self.p0 < 1:
            raise DomainError("p0_out_of_range",
                              f"p0 must lie in (0, 1), got {self.p0}")

    @classmethod
    def z_test(cls, level: float, tail: str = "greater", pooled: bool = False,
               continuity: bool = True, p0: float | None = None) -> "SuccessIndicator":
        return cls("z_test", level=level, tail=tail, pooled=pooled,
                   continuity=continuity, p0=p0)

    @classmethod
    def fisher_exact(cls, level: float, tail: str = "greater") -> "SuccessIndicator":
        return cls("fisher_exact", level=level, tail=tail)

    @classmethod
    def exact_binomial(cls, level: float, p0: float,
                       tail: str = "greater") -> "SuccessIndicator":
        return cls("exact_binomial", level=level, tail=tail, p0=p0)

    @classmethod
    def clinical_threshold(cls, pi_min: float | None = None,
                           delta_min: float | None = None,
                           tail: str = "greater") -> "SuccessIndicator":
        return cls("clinical_threshold", tail=tail, pi_min=pi_min,
                   delta_min=delta_min)


class PposResult(float):
    """PPoS value carrying how it was computed.

    Behaves as a plain float; `cells` counts indicator evaluations and
    `zero_variance_cells` counts final-data cells where a Z statistic was
    undefined and the exact-test fallback decided instead.
    """

    zero_variance_cells: int
    cells: int

    def __new__(cls, value: float, zero_variance_cells: int = 0,
                cells: int = 0) -> "PposResult":
        self = super().__new__(cls, value)
        self.zero_variance_cells = zero_variance_cells
        self.cells = cells
        return self


def posterior_beta(prior: BetaPrior, arm: ArmInterim) -> BetaPrior:
    """Conjugate update: Beta(a, b) with x of n responders -> Beta(x+a, n-x+b)."""
    return BetaPrior(arm.x + prior.a, arm.n - arm.x + prior.b)


def beta_binom_pmf(arm: ArmInterim, prior: BetaPrior, y: int) -> float:
    """P(exactly y responders among the remaining N-n subjects)."""
    m = arm.remaining
    if isinstance(y, bool) or not isinstance(y, (int, np.integer)):
        raise DomainError("count_not_integer", f"y must be an integer, got {y!r}")
    if not 0 <= y <= m:
        raise DomainError("y_out_of_support",
                          f"y must lie in 0..{m}, got {y}")
    post = posterior_beta(prior, arm)
    lp = (log_choose(m, y) + log_beta(post.a + y, post.b + m - y)
          - log_beta(post.a, post.b))
    return float(math.exp(lp))


def predictive_pmf(arm: ArmInterim, prior: BetaPrior) -> np.ndarray:
    """Full predictive pmf over y = 0..N-n, normalized to machine precision.

    Built from the term-to-term ratio
        pmf(y+1)/pmf(y) = (m-y)(a'+y) / ((y+1)(b'+m-y-1))
    anchored at the largest term, so the sum is 1 up to a final division.
    A direct log-gamma evaluation drifts to ~1e-11 in the sum by m = 5000,
    which this construction avoids.
    """
    m = arm.remaining
    post = posterior_beta(prior, arm)
    if m == 0:
        return np.ones(1)
    y = np.arange(m, dtype=float)
    ratios = ((m - y) * (post.a + y)) / ((y + 1.0) * (post.b + m - y - 1.0))
    # anchor at the argmax so every relative term is <= 1 (no overflow even
    # for U-shaped laws with a', b' < 1)
    log_rel = np.concatenate(([0.0], np.cumsum(np.log(ratios))))
    anchor = int(np.argmax(log_rel))
    raw = np.empty(m + 1)
    raw[anchor] = 1.0
    if anchor < m:
        raw[anchor + 1:] = np.cumprod(ratios[anchor:])
    if anchor > 0:
        raw[anchor - 1::-1] = np.cumprod(1.0 / ratios[anchor - 1::-1])
    total = math.fsum(raw.tolist())
    return raw / total


def _z_decision(diff: np.ndarray, se: np.ndarray, halfwidth: float,
                indicator: SuccessIndicator, crit: float) -> np.ndarray:
    """Vectorized Z-test verdicts; cells with se == 0 come back False and
    must be overridden by the caller's exact-test fallback."""
    cc = halfwidth if indicator.continuity else 0.0
    shrunk = np.maximum(np.abs(diff) - cc, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(se > 0, np.sign(diff) * shrunk / np.where(se > 0, se, 1.0),
                     0.0)
    return (z > crit) if indicator.tail == "greater" else (z < -crit)


def indicator_eval(indicator: SuccessIndicator, x_t: int, n_t: int,
                   x_c: int | None = None, n_c: int | None = None) -> bool:
    """Apply a success indicator to final counts (n_t, n_c are final sizes).

    One-arm when x_c is None.  Zero-variance Z statistics silently defer to
    the matching exact test; use the ppos functions to see how often.
    """
    two_arm = x_c is not None
    if two_arm == (n_c is None):
        raise DomainError("incomplete_final_data",
                          "pass both x_c and n_c for two arms, neither for one")
    for name, x, n in (("treatment", x_t, n_t),) + (
            (("control", x_c, n_c),) if two_arm else ()):
        if not 0 <= x <= n or n == 0:
            raise DomainError("count_order",
                              f"{name} arm needs 0 <= x <= n with n >= 1, got "
                              f"x={x}, n={n}")
    kind, tail = indicator.kind, indicator.tail

    if kind == "clinical_threshold":
        if not two_arm and indicator.delta_min is not None:
            raise DomainError("indicator_arms_mismatch",
                              "delta_min needs two arms")
        if indicator.delta_min is not None:
            diff = x_t / n_t - x_c / n_c
            return diff > indicator.delta_min if tail == "greater" \
                else diff < indicator.delta_min
        p_hat = x_t / n_t
        return p_hat >= indicator.pi_min if tail == "greater" \
            else p_hat <= indicator.pi_min

    if kind == "fisher_exact":
        if not two_arm:
            raise DomainError("indicator_arms_mismatch",
                              "fisher_exact applies to two arms")
        return fisher_exact_one_sided(x_t, n_t, x_c, n_c, tail) <= indicator.level

    if kind == "exact_binomial":
        if two_arm:
            raise DomainError("indicator_arms_mismatch",
                              "exact_binomial applies to one arm")
        return exact_binom_test(x_t, n_t, indicator.p0, tail) <= indicator.level

    # z_test
    crit = std_normal_quantile(1.0 - indicator.level)
    if two_arm:
        p_t, p_c = x_t / n_t, x_c / n_c
        if indicator.pooled:
            pbar = (x_t + x_c) / (n_t + n_c)
            se = math.sqrt(pbar * (1 - pbar) * (1 / n_t + 1 / n_c))
        else:
            se = math.sqrt(p_t * (1 - p_t) / n_t + p_c * (1 - p_c) / n_c)
        if se == 0.0:
            return fisher_exact_one_sided(x_t, n_t, x_c, n_c, tail) <= indicator.level
        half = 0.5 * (1 / n_t + 1 / n_c)
        return bool(_z_decision(np.asarray(p_t - p_c), np.asarray(se), half,
                                indicator, crit))
    if indicator.p0 is None:
        raise DomainError("missing_p0", "one-arm z_test needs p0")
    p_hat = x_t / n_t
    se = math.sqrt(p_hat * (1 - p_hat) / n_t)
    if se == 0.0:
        return exact_binom_test(x_t, n_t, indicator.p0, tail) <= indicator.level
    return bool(_z_decision(np.asarray(p_hat - indicator.p0), np.asarray(se),
                            0.5 / n_t, indicator, crit))


def _fisher_success_grid(arm_t: ArmInterim, arm_c: ArmInterim, level: float,
                         tail: str) -> np.ndarray:
    """Fisher verdicts for every (y_t, y_c); one hypergeometric pmf per
    final success total instead of one test per cell."""
    N_t, N_c = arm_t.N, arm_c.N
    m_t, m_c = arm_t.remaining, arm_c.remaining
    success = np.zeros((m_t + 1, m_c + 1), dtype=bool)
    for d in range(m_t + m_c + 1):
        s = arm_t.x + arm_c.x + d
        lo, hi = max(0, s - N_c), min(N_t, s)
        i = np.arange(lo, hi + 1, dtype=float)
        p = np.exp(log_choose(N_t, i) + log_choose(N_c, s - i)
                   - log_choose(N_t + N_c, s))
        tails = (np.cumsum(p[::-1])[::-1] if tail == "greater"
                 else np.cumsum(p))
        y_t = np.arange(max(0, d - m_c), min(m_t, d) + 1)
        success[y_t, d - y_t] = tails[arm_t.x + y_t - lo] <= level
    return success


def ppos_one_arm(prior: BetaPrior, arm: ArmInterim,
                 indicator: SuccessIndicator) -> PposResult:
    """Exact PPoS: predictive law summed over accepted final outcomes."""
    if indicator.kind == "fisher_exact" or (
            indicator.kind == "clinical_threshold"
            and indicator.delta_min is not None):
        raise DomainError("indicator_arms_mismatch",
                          f"{indicator.kind} does not apply to one arm")
    if indicator.kind == "z_test" and indicator.p0 is None:
        raise DomainError("missing_p0", "one-arm z_test needs p0")
    pmf = predictive_pmf(arm, prior)
    m = arm.remaining
    x_final = arm.x + np.arange(m + 1)
    zero_var = 0

    if indicator.kind == "clinical_threshold":
        p_hat = x_final / arm.N
        ok = (p_hat >= indicator.pi_min if indicator.tail == "greater"
              else p_hat <= indicator.pi_min)
    elif indicator.kind == "exact_binomial":
        ok = np.array([exact_binom_test(int(x), arm.N, indicator.p0,
                                        indicator.tail) <= indicator.level
                       for x in x_final])
    else:
        crit = std_normal_quantile(1.0 - indicator.level)
        p_hat = x_final / arm.N
        se = np.sqrt(p_hat * (1 - p_hat) / arm.N)
        ok = _z_decision(p_hat - indicator.p0, se, 0.5 / arm.N, indicator, crit)
        degenerate = np.flatnonzero(se == 0.0)
        zero_var = degenerate.size
        for j in degenerate:
            ok[j] = exact_binom_test(int(x_final[j]), arm.N, indicator.p0,
                                     indicator.tail) <= indicator.level
    value = math.fsum(pmf[ok].tolist())
    return PposResult(min(1.0, value), zero_variance_cells=zero_var,
                      cells=m + 1)


def ppos_two_arm(prior_t: BetaPrior, prior_c: BetaPrior, arm_t: ArmInterim,
                 arm_c: ArmInterim, indicator: SuccessIndicator) -> PposResult:
    """Exact PPoS over the joint predictive law of both arms' futures."""
    if indicator.kind == "exact_binomial":
        raise DomainError("indicator_arms_mismatch",
                          "exact_binomial does not apply to two arms")
    pmf_t = predictive_pmf(arm_t, prior_t)
    pmf_c = predictive_pmf(arm_c, prior_c)
    m_t, m_c = arm_t.remaining, arm_c.remaining
    x_t = arm_t.x + np.arange(m_t + 1)[:, None]
    x_c = arm_c.x + np.arange(m_c + 1)[None, :]
    p_t, p_c = x_t / arm_t.N, x_c / arm_c.N
    zero_var = 0

    if indicator.kind == "clinical_threshold":
        if indicator.pi_min is not None:
            # treatment-rate target: the control arm plays no part
            cmp = (p_t >= indicator.pi_min if indicator.tail == "greater"
                   else p_t <= indicator.pi_min)
            ok = np.broadcast_to(cmp, (m_t + 1, m_c + 1))
        else:
            diff = p_t - p_c
            ok = (diff > indicator.delta_min if indicator.tail == "greater"
                  else diff < indicator.delta_min)
    elif indicator.kind == "fisher_exact":
        ok = _fisher_success_grid(arm_t, arm_c, indicator.level, indicator.tail)
    else:
        crit = std_normal_quantile(1.0 - indicator.level)
        if indicator.pooled:
            pbar = (x_t + x_c) / (arm_t.N + arm_c.N)
            se = np.sqrt(pbar * (1 - pbar) * (1 / arm_t.N + 1 / arm_c.N))
        else:
            se = np.sqrt(p_t * (1 - p_t) / arm_t.N + p_c * (1 - p_c) / arm_c.N)
        half = 0.5 * (1 / arm_t.N + 1 / arm_c.N)
        ok = _z_decision(p_t - p_c, se, half, indicator, crit)
        rows, cols = np.nonzero(np.broadcast_to(se == 0.0, ok.shape))
        zero_var = rows.size
        for r, c in zip(rows, cols):
            ok[r, c] = fisher_exact_one_sided(
                int(arm_t.x + r), arm_t.N, int(arm_c.x + c), arm_c.N,
                indicator.tail) <= indicator.level
    # fsum keeps the result independent of any partitioning of the grid
    terms = np.outer(pmf_t, pmf_c)[ok]
    value = math.fsum(terms.tolist())
    return PposResult(min(1.0, value), zero_variance_cells=zero_var,
                      cells=(m_t + 1) * (m_c + 1))
