"""Shared argument validation for the public API."""

import math

DIM_MAX = 16


def check_dimension(d):
    """Lattice dimension: integer in [1, DIM_MAX].

    The upper bound keeps the exact DP oracles and d-fold exponentiation
    at desk scale; nothing in the math itself stops at 16.
    """
    if isinstance(d, bool) or not isinstance(d, int):
        raise ValueError(f"dimension must be an integer, got {d!r}")
    if not 1 <= d <= DIM_MAX:
        raise ValueError(f"dimension must be in [1, {DIM_MAX}], got {d}")
    return d


def check_time(t, name="time"):
    t = float(t)
    if not math.isfinite(t) or t < 0:
        raise ValueError(f"{name} must be a finite real >= 0, got {t}")
    return t


def check_count(n, name="count"):
    if isinstance(n, bool) or not isinstance(n, int):
        raise ValueError(f"{name} must be an integer, got {n!r}")
    if n < 0:
        raise ValueError(f"{name} must be >= 0, got {n}")
    return n
