"""Scalar numerical primitives: normal cdf/quantile, log-space combinatorics,
and the two small exact tests used as success indicators on binary data.

The quantile is computed by safeguarded Newton iteration on the cdf inside a
bisection bracket, so its accuracy is tied to the cdf itself rather than to a
closed-form approximation.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special as sc

from .errors import DomainError, NumericalError

__all__ = [
    "std_normal_cdf",
    "std_normal_pdf",
    "std_normal_quantile",
    "log_choose",
    "log_beta",
    "binom_log_pmf",
    "exact_binom_test",
    "fisher_exact_one_sided",
]

_SQRT_2PI = math.sqrt(2.0 * math.pi)


def std_normal_cdf(x):
    """Standard normal cdf, elementwise.

    Backed by the complementary error function, so the absolute error stays
    below 1e-12 over the whole real line (including far tails).
    """
    return sc.ndtr(x)


def std_normal_pdf(x):
    """Standard normal density, elementwise."""
    x = np.asarray(x, dtype=float)
    out = np.exp(-0.5 * x * x) / _SQRT_2PI
    return out if out.ndim else float(out)


def _quantile_scalar(p: float) -> float:
    # Solve ndtr(x) = p for the lower-tail side, mirror for p > 1/2.
    if p == 0.5:
        return 0.0
    mirrored = p > 0.5
    if mirrored:
        p = 1.0 - p
    lo, hi = -40.0, 0.0  # ndtr(-40) underflows to 0 < p <= ndtr(0)
    for _ in range(14):  # localize before polishing, Newton is local
        mid = 0.5 * (lo + hi)
        if sc.ndtr(mid) < p:
            lo = mid
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    for _ in range(200):
        f = sc.ndtr(x) - p
        if f == 0.0:
            break
        if f > 0.0:
            hi = x
        else:
            lo = x
        d = math.exp(-0.5 * x * x) / _SQRT_2PI
        step = f / d if d > 0.0 else math.inf
        nxt = x - step
        if not lo < nxt < hi:
            nxt = 0.5 * (lo + hi)  # Newton left the bracket, bisect instead
        if abs(nxt - x) <= 1e-16 * max(1.0, abs(nxt)):
            x = nxt
            break
        x = nxt
    else:
        raise NumericalError("quantile_no_convergence",
                             f"normal quantile did not converge for p={p!r}")
    return -x if mirrored else x


def std_normal_quantile(p):
    """Inverse of ``std_normal_cdf``.

    Parameters
    ----------
    p : float or array_like
        Probabilities, each strictly inside (0, 1).

    Returns
    -------
    float or ndarray

    Raises
    ------
    DomainError
        If any probability lies outside the open interval (0, 1).
    """
    arr = np.asarray(p, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr <= 0.0) or np.any(arr >= 1.0):
        raise DomainError("p_out_of_range",
                          "quantile requires probabilities strictly between 0 and 1")
    if arr.ndim == 0:
        return _quantile_scalar(float(arr))
    out = np.empty_like(arr)
    flat_in, flat_out = arr.ravel(), out.ravel()
    for i, v in enumerate(flat_in):
        flat_out[i] = _quantile_scalar(float(v))
    return out


def log_choose(n, k):
    """log of the binomial coefficient C(n, k), elementwise."""
    n = np.asarray(n, dtype=float)
    k = np.asarray(k, dtype=float)
    out = sc.gammaln(n + 1.0) - sc.gammaln(k + 1.0) - sc.gammaln(n - k + 1.0)
    return out if out.ndim else float(out)


def log_beta(a, b):
    """log of the beta function B(a, b); both arguments must be positive."""
    a_arr = np.asarray(a, dtype=float)
    b_arr = np.asarray(b, dtype=float)
    if np.any(a_arr <= 0.0) or np.any(b_arr <= 0.0):
        raise DomainError("beta_args_nonpositive",
                          "log_beta requires strictly positive arguments")
    out = sc.betaln(a_arr, b_arr)
    return out if out.ndim else float(out)


def binom_log_pmf(k, n, p):
    """log pmf of Binomial(n, p) at k, elementwise.

    p may be 0 or 1; the pmf then degenerates to a point mass and the log pmf
    is 0 or -inf accordingly.
    """
    k_arr = np.asarray(k, dtype=float)
    n_arr = np.asarray(n, dtype=float)
    p_arr = np.asarray(p, dtype=float)
    if np.any(p_arr < 0.0) or np.any(p_arr > 1.0):
        raise DomainError("p_out_of_range", "binomial probability must lie in [0, 1]")
    if np.any(k_arr < 0) or np.any(k_arr > n_arr):
        raise DomainError("k_out_of_range", "binomial count must satisfy 0 <= k <= n")
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (log_choose(n_arr, k_arr)
               + np.where(k_arr > 0, k_arr * np.log(p_arr), 0.0)
               + np.where(n_arr - k_arr > 0, (n_arr - k_arr) * np.log1p(-p_arr), 0.0))
    out = np.asarray(out)
    # point masses at p = 0 or 1
    out = np.where((p_arr == 0.0) & (k_arr > 0), -np.inf, out)
    out = np.where((p_arr == 1.0) & (k_arr < n_arr), -np.inf, out)
    return out if out.ndim else float(out)


def exact_binom_test(x: int, n: int, p0: float, alternative: str = "greater") -> float:
    """One-sided exact binomial tail probability.

    ``greater`` returns P(X >= x) and ``less`` returns P(X <= x) under
    X ~ Binomial(n, p0).
    """
    if not 0 <= x <= n:
        raise DomainError("k_out_of_range", "binomial count must satisfy 0 <= x <= n")
    if not 0.0 <= p0 <= 1.0:
        raise DomainError("p_out_of_range", "binomial probability must lie in [0, 1]")
    if alternative == "greater":
        ks = np.arange(x, n + 1)
    elif alternative == "less":
        ks = np.arange(0, x + 1)
    else:
        raise DomainError("bad_alternative", "alternative must be 'greater' or 'less'")
    logs = binom_log_pmf(ks, n, p0)
    return float(min(1.0, math.fsum(np.exp(np.asarray(logs, dtype=float)))))


def fisher_exact_one_sided(x_t: int, n_t: int, x_c: int, n_c: int,
                           alternative: str = "greater") -> float:
    """One-sided Fisher exact p-value for a 2x2 table of successes by arm.

    Conditions on both margins; ``greater`` is evidence that the first arm's
    success probability exceeds the second's (tail of the hypergeometric law
    of the first-arm success count at or beyond the observed ``x_t``).
    """
    for v, n, who in ((x_t, n_t, "first"), (x_c, n_c, "second")):
        if n <= 0 or not 0 <= v <= n:
            raise DomainError("table_invalid",
                              f"{who} arm needs 0 <= successes <= size with size > 0")
    total = n_t + n_c
    succ = x_t + x_c
    k_min = max(0, succ - n_c)
    k_max = min(succ, n_t)
    if alternative == "greater":
        ks = np.arange(x_t, k_max + 1)
    elif alternative == "less":
        ks = np.arange(k_min, x_t + 1)
    else:
        raise DomainError("bad_alternative", "alternative must be 'greater' or 'less'")
    logs = (log_choose(succ, ks) + log_choose(total - succ, n_t - ks)
            - log_choose(total, n_t))
    return float(min(1.0, math.fsum(np.exp(np.asarray(logs, dtype=float)))))
