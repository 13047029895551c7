"""Hot loops for the survival simulation: event cutoff and Kaplan-Meier medians.

Two interchangeable implementations live here: a compiled one (numba) and a
plain numpy one.  Import-time selection prefers the compiled path when numba
is installed; setting SUCCPROB_NO_NUMBA=1 forces the plain path.  Both are
always importable by name so they can be benchmarked against each other, and
they must agree bit for bit.
"""

from __future__ import annotations

import math
import os

import numpy as np

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised via the env flag instead
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn
        if args and callable(args[0]):
            return args[0]
        return wrap

USING_NUMBA = HAS_NUMBA and os.environ.get("SUCCPROB_NO_NUMBA", "") != "1"


def _km_median_core(fup: np.ndarray, event: np.ndarray) -> float:
    """Smallest event time where the product-limit curve drops to <= 1/2.

    NaN when the curve never gets there.  Ties share one risk set; censored
    subjects at a tied time stay at risk for that time's events.
    """
    n = fup.shape[0]
    order = np.argsort(fup)
    at_risk = n
    surv = 1.0
    i = 0
    while i < n:
        t = fup[order[i]]
        deaths = 0
        j = i
        while j < n and fup[order[j]] == t:
            if event[order[j]]:
                deaths += 1
            j += 1
        if deaths > 0:
            surv *= 1.0 - deaths / at_risk
            # exact 0.5 counts as crossed; tolerate one ulp of product noise
            if surv <= 0.5 + 1e-12:
                return t
        at_risk -= j - i
        i = j
    return math.nan


def _cutoff_core(fup: np.ndarray, event: np.ndarray, target_events: int):
    """Administrative cutoff at the target_events-th observed event time.

    Fewer events than the target move the cutoff to the last one; the event
    flag is decided against the original follow-up before truncation.
    """
    n = fup.shape[0]
    times = np.empty(n)
    count = 0
    for i in range(n):
        if event[i]:
            times[count] = fup[i]
            count += 1
    if count == 0:
        return fup.copy(), event.copy()
    evt = np.sort(times[:count])
    tau = evt[min(count, target_events) - 1]
    fup2 = np.empty(n)
    event2 = np.empty(n, dtype=np.bool_)
    for i in range(n):
        event2[i] = event[i] and fup[i] <= tau
        fup2[i] = fup[i] if fup[i] <= tau else tau
    return fup2, event2


def _batch_core(fup: np.ndarray, event: np.ndarray, target_events: int,
                out: np.ndarray) -> None:
    for r in range(fup.shape[0]):
        f2, e2 = _cutoff_core(fup[r], event[r], target_events)
        med = _km_median_core(f2, e2)
        out[r] = math.log(med) if med == med else math.nan


km_median_numpy = _km_median_core
cutoff_numpy = _cutoff_core


def batch_log_median_numpy(fup: np.ndarray, event: np.ndarray,
                           target_events: int) -> np.ndarray:
    out = np.empty(fup.shape[0])
    _batch_core(fup, event, target_events, out)
    return out


if HAS_NUMBA:
    km_median_numba = njit(cache=True)(_km_median_core)
    cutoff_numba = njit(cache=True)(_cutoff_core)

    @njit(cache=True)
    def _batch_core_nb(fup, event, target_events, out):
        for r in range(fup.shape[0]):
            f2, e2 = cutoff_numba(fup[r], event[r], target_events)
            med = km_median_numba(f2, e2)
            out[r] = math.log(med) if med == med else math.nan

    def batch_log_median_numba(fup: np.ndarray, event: np.ndarray,
                               target_events: int) -> np.ndarray:
        out = np.empty(fup.shape[0])
        _batch_core_nb(np.ascontiguousarray(fup),
                       np.ascontiguousarray(event), target_events, out)
        return out


if USING_NUMBA:
    km_median = km_median_numba
    apply_cutoff = cutoff_numba
    batch_log_median = batch_log_median_numba
else:
    km_median = km_median_numpy
    apply_cutoff = cutoff_numpy
    batch_log_median = batch_log_median_numpy
