"""Success probabilities for clinical trials at the design stage and at interim.

The package computes conditional power, predictive probability of success,
and design-stage probability of success on a common scale for continuous,
binary, and time-to-event endpoints, plus an exact beta-binomial predictive
calculation for small binary trials and a Monte Carlo layer for validating
the closed forms.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import DomainError, NumericalError, SuccprobError

__all__ = [
    "__version__",
    "SuccprobError",
    "DomainError",
    "NumericalError",
]
