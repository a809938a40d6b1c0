"""
Input validation utilities.
Validate early, fail fast with clear messages.
"""
from typing import Tuple
import math
import numbers


def validate_node_count(value: int, minimum: int = 2, name: str = "T") -> Tuple[bool, str]:
    """
    Validate a vertex / node count.

    Args:
        value: Count to check
        minimum: Smallest accepted value
        name: Parameter name used in the message

    Returns:
        Tuple of (is_valid, error_message)
    """
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        return False, f"{name} must be an integer, got {value!r}"
    if int(value) < minimum:
        return False, f"{name} must be at least {minimum}, got {value}"
    return True, ""


def validate_probability(value: float, name: str = "p") -> Tuple[bool, str]:
    """Validate a probability in [0, 1]."""
    if value is None or not math.isfinite(value):
        return False, f"{name} must be a finite number"
    if value < 0.0 or value > 1.0:
        return False, f"{name} must lie in [0, 1], got {value}"
    return True, ""


def validate_positive(value: float, name: str) -> Tuple[bool, str]:
    """Validate a strictly positive finite real."""
    if value is None or not math.isfinite(value):
        return False, f"{name} must be a finite number"
    if value <= 0.0:
        return False, f"{name} must be > 0, got {value}"
    return True, ""


def validate_nonnegative(value: float, name: str) -> Tuple[bool, str]:
    """Validate a nonnegative finite real."""
    if value is None or not math.isfinite(value):
        return False, f"{name} must be a finite number"
    if value < 0.0:
        return False, f"{name} must be >= 0, got {value}"
    return True, ""


def validate_confidence(delta: float, upper: float = math.exp(-1.0)) -> Tuple[bool, str]:
    """
    Validate a confidence parameter delta in (0, upper].

    The upper end is accepted so that delta = 1/e (log(1/delta) = 1) can be used.
    """
    if delta is None or not math.isfinite(delta):
        return False, "delta must be a finite number"
    if delta <= 0.0 or delta > upper * (1.0 + 1e-15):
        return False, f"delta must lie in (0, {upper:.6g}], got {delta}"
    return True, ""
