"""Input validation helpers shared by the functional API and the estimators."""

from __future__ import annotations

import math
import numbers


def check_probability(value, name: str, *, positive: bool = False) -> float:
    """Return ``value`` as a float after checking it lies in [0, 1].

    With ``positive=True`` the value must additionally be strictly above zero.
    """
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise TypeError(f"{name} must be a real number, got {type(value).__name__}")
    value = float(value)
    if math.isnan(value) or not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value!r}")
    if positive and value == 0.0:
        raise ValueError(f"{name} must be > 0, got 0")
    return value


def check_db(value, name: str, *, allow_neg_inf: bool = False) -> float:
    """Return a decibel quantity as float; ``-inf`` dB is allowed only on request."""
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise TypeError(f"{name} must be a real number, got {type(value).__name__}")
    value = float(value)
    if math.isnan(value) or value == math.inf:
        raise ValueError(f"{name} must be finite, got {value!r}")
    if value == -math.inf and not allow_neg_inf:
        raise ValueError(f"{name} must be finite, got -inf")
    return value


def check_int(value, name: str, *, minimum: int = 0) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise TypeError(f"{name} must be an integer, got {type(value).__name__}")
    value = int(value)
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return value
