"""
Penalty selection rules mu* and the squared-error rate envelopes that go with them.

Every rule returns max{first branch, constant branch}; the first branch
balances bias against variance and may be negative, the constant branch keeps
mu in the regime where lambda_bar'(mu) saturates.
"""

from typing import Literal
import math

from src.core.config import DEFAULT_C1, settings
from src.core.exceptions import InvalidParameterError, InvalidSizeError
from src.core.logging_config import get_logger
from src.utils.validators import (
    validate_confidence,
    validate_node_count,
    validate_nonnegative,
    validate_positive,
    validate_probability,
)

logger = get_logger("bounds")

FamilyKind = Literal["complete", "star"]


def _positive(**values):
    for name, value in values.items():
        is_valid, error = validate_positive(value, name)
        if not is_valid:
            raise InvalidParameterError(error)


def _nonnegative(**values):
    for name, value in values.items():
        is_valid, error = validate_nonnegative(value, name)
        if not is_valid:
            raise InvalidParameterError(error)


def _sizes(n: int, T: int):
    for value, name, minimum in ((n, "n", 1), (T, "T", 2)):
        is_valid, error = validate_node_count(value, minimum=minimum, name=name)
        if not is_valid:
            raise InvalidSizeError(error)


def _family(graph_kind: str):
    if graph_kind not in ("complete", "star"):
        raise InvalidParameterError(f"No mu* rule for graph kind {graph_kind!r}; expected 'complete' or 'star'")


def mu_star_complete(lmin: float, lmax: float, n: int, sigma: float, design_norm: float,
                     S_T: float, T: int, c1: float = None) -> float:
    """Complete graph, general measurements."""
    c1 = settings.C1_COMPLETE if c1 is None else c1
    _sizes(n, T)
    _positive(lmin=lmin, lmax=lmax, S_T=S_T, c1=c1)
    _nonnegative(sigma=sigma, design_norm=design_norm)

    lead = (2.0 * n * sigma ** 2 * design_norm ** 2) ** (1.0 / 3.0)
    first = lead * (lmin / S_T) ** (1.0 / 3.0) / T ** (2.0 / 3.0) - lmin / T ** 2
    second = (c1 / T) * (lmin / T + design_norm ** 2 * lmax / lmin)
    return max(first, second)


def mu_star_star_graph(lmin: float, lmax: float, n: int, sigma: float, design_norm: float,
                       S_T: float, T: int, c1: float = None) -> float:
    """Star graph, general measurements."""
    c1 = settings.C1_STAR if c1 is None else c1
    _sizes(n, T)
    _positive(lmin=lmin, lmax=lmax, S_T=S_T, c1=c1)
    _nonnegative(sigma=sigma, design_norm=design_norm)

    lead = (2.0 * n * sigma ** 2 * design_norm ** 2) ** (1.0 / 3.0)
    first = lead * lmin ** (1.0 / 3.0) / S_T ** (1.0 / 3.0) - lmin / T
    second = c1 * (lmin / T + design_norm ** 2 * lmax / lmin)
    return max(first, second)


def sample_size_condition(theta: float, n: int, delta: float) -> float:
    """Smallest T with T >= (8n/theta) log(n/delta)."""
    return 8.0 * n / theta * math.log(n / delta)


def mu_star_rand_samp(theta: float, T: int, n: int, sigma: float, S_T: float,
                      c1: float = None, graph_kind: FamilyKind = "complete",
                      delta: float = None) -> float:
    """
    Sparse random measurements with sampling probability theta.

    complete: max{sigma^(2/3) (theta/(T S_T))^(1/3) - theta/(T n), c1/T}
    star:     max{sigma^(2/3) theta^(1/3) T^(1/3) / S_T^(2/3) - theta/n, c1}

    With sigma = 0 the first branch is its subtraction term alone, so S_T = 0
    is accepted in that case.
    """
    _family(graph_kind)
    c1 = DEFAULT_C1[graph_kind] if c1 is None else c1
    _sizes(n, T)
    is_valid, error = validate_probability(theta, "theta")
    if not is_valid or theta == 0.0:
        raise InvalidParameterError(error or "theta must lie in (0, 1]")
    _nonnegative(sigma=sigma, S_T=S_T)
    _positive(c1=c1)
    if sigma > 0 and S_T <= 0:
        raise InvalidParameterError("S_T must be > 0 when sigma > 0")

    delta = settings.GAMMA_DELTA if delta is None else delta
    needed = sample_size_condition(theta, n, delta)
    if T < needed:
        logger.warning(
            f"T={T} is below the sample-size condition (8n/theta)log(n/delta) = {needed:.1f}; "
            f"the spectral sandwich for O_T^T O_T may not hold"
        )

    s23 = sigma ** (2.0 / 3.0)
    if graph_kind == "complete":
        first = (s23 * (theta / (T * S_T)) ** (1.0 / 3.0) if sigma > 0 else 0.0) - theta / (T * n)
        return max(first, c1 / T)
    first = (s23 * theta ** (1.0 / 3.0) * T ** (1.0 / 3.0) / S_T ** (2.0 / 3.0) if sigma > 0 else 0.0) - theta / n
    return max(first, c1)


def gamma_nT(n: int, p_max: float, T: int, delta: float = None) -> float:
    """min{sqrt(2 n p_max) + (2 n log(nT/delta))^(1/4), sqrt(2n)}, a bound on ||C||_2."""
    delta = settings.GAMMA_DELTA if delta is None else delta
    is_valid, error = validate_node_count(n, minimum=1, name="n")
    if not is_valid:
        raise InvalidSizeError(error)
    is_valid, error = validate_node_count(T, minimum=1, name="T")
    if not is_valid:
        raise InvalidSizeError(error)
    is_valid, error = validate_probability(p_max, "p_max")
    if not is_valid:
        raise InvalidParameterError(error)
    if not (0.0 < delta < 1.0):
        raise InvalidParameterError(f"delta must lie in (0, 1), got {delta}")

    concentrated = math.sqrt(2.0 * n * p_max) + (2.0 * n * math.log(n * T / delta)) ** 0.25
    return min(concentrated, math.sqrt(2.0 * n))


def p_sum_condition(n: int, delta: float, c: float = 1.0) -> float:
    """Advisory lower bound c log(n/delta) / n on p_sum for the Erdos-Renyi Gram sandwich."""
    return c * math.log(n / delta) / n


def mu_star_sync(p_sum: float, gamma: float, n: int, sigma: float, S_T: float, T: int,
                 c2: float = None, graph_kind: FamilyKind = "complete") -> float:
    """
    Synchronization over Erdos-Renyi layers.

    complete: max{(n sigma gamma)^(2/3) (p_sum/(T^2 S_T))^(1/3) - n p_sum/T^2, (c2/T)(n p_sum/T + gamma^2)}
    star:     max{(n sigma gamma)^(2/3) (p_sum/S_T)^(1/3) - n p_sum/T,       (c2/T)(n p_sum/T + gamma^2)}
    """
    _family(graph_kind)
    c2 = settings.C2_SYNC if c2 is None else c2
    _sizes(n, T)
    _positive(p_sum=p_sum, gamma=gamma, c2=c2)
    _nonnegative(sigma=sigma, S_T=S_T)
    if sigma > 0 and S_T <= 0:
        raise InvalidParameterError("S_T must be > 0 when sigma > 0")

    lead = (n * sigma * gamma) ** (2.0 / 3.0)
    if graph_kind == "complete":
        first = (lead * (p_sum / (T ** 2 * S_T)) ** (1.0 / 3.0) if sigma > 0 else 0.0) - n * p_sum / T ** 2
    else:
        first = (lead * (p_sum / S_T) ** (1.0 / 3.0) if sigma > 0 else 0.0) - n * p_sum / T
    second = (c2 / T) * (n * p_sum / T + gamma ** 2)
    return max(first, second)


def rate_rand_samp(theta: float, T: int, n: int, sigma: float, S_T: float, delta: float,
                   graph_kind: FamilyKind = "complete", c2: float = 1.0) -> float:
    """Squared-error envelope ||x_hat - x||^2 for sparse random measurements at mu*."""
    _family(graph_kind)
    is_valid, error = validate_confidence(delta)
    if not is_valid:
        raise InvalidParameterError(error)
    _positive(theta=theta)
    _nonnegative(sigma=sigma, S_T=S_T)

    log_term = math.log(1.0 / delta)
    noise = n ** 3 * sigma ** 2 / theta ** 2
    if graph_kind == "complete":
        bias = n * S_T / (theta * T)
        mixed = n * sigma ** (2.0 / 3.0) * S_T ** (2.0 / 3.0) / (theta ** (2.0 / 3.0) * T ** (1.0 / 3.0))
    else:
        bias = n * S_T / theta
        mixed = n * sigma ** (2.0 / 3.0) * T ** (1.0 / 3.0) * S_T ** (2.0 / 3.0) / theta ** (2.0 / 3.0)
    return c2 * (bias + (mixed + noise) * log_term)


def rate_sync(p_sum: float, gamma: float, n: int, sigma: float, S_T: float, T: int, delta: float,
              graph_kind: FamilyKind = "complete", c3: float = 1.0) -> float:
    """Squared-error envelope for synchronization over Erdos-Renyi layers at mu*."""
    _family(graph_kind)
    is_valid, error = validate_confidence(delta)
    if not is_valid:
        raise InvalidParameterError(error)
    _positive(p_sum=p_sum, gamma=gamma)
    _nonnegative(sigma=sigma, S_T=S_T)

    log_term = math.log(1.0 / delta)
    s23 = sigma ** (2.0 / 3.0)
    g23 = gamma ** (2.0 / 3.0)
    noise = sigma ** 2 * gamma ** 2 * T ** 2 / (n * p_sum ** 2)
    denom = n ** (1.0 / 3.0) * p_sum ** (2.0 / 3.0)
    if graph_kind == "complete":
        bias = S_T / T + gamma ** 2 * S_T / (n * p_sum)
        mixed = s23 * g23 * T ** (1.0 / 3.0) * S_T ** (2.0 / 3.0) / denom
    else:
        bias = S_T + gamma ** 2 * T * S_T / (n * p_sum)
        mixed = s23 * g23 * T * S_T ** (2.0 / 3.0) / denom
    return c3 * (bias + (mixed + noise) * log_term)
