"""
Ground-truth signal generators and Gaussian noise.

Every Gaussian draw goes through box_muller() on the uniform stream of the
supplied numpy Generator, so outputs are a pure function of (parameters, seed).
"""

from dataclasses import dataclass
from typing import Literal
import math
import numpy as np

from src.core.exceptions import InvalidParameterError, InvalidSizeError
from src.core.logging_config import get_logger
from src.graph.core import StackedSignal
from src.utils.validators import validate_node_count, validate_nonnegative

logger = get_logger("signals")

BudgetLaw = Literal["star_recipe", "complete_recipe", "custom"]


@dataclass(frozen=True)
class SmoothnessBudget:
    """Target bound S_T on the quadratic variation and the recipe meeting it."""
    S_T: float
    law: BudgetLaw = "custom"

    def __post_init__(self):
        is_valid, error = validate_nonnegative(self.S_T, "S_T")
        if not is_valid:
            raise InvalidParameterError(error)


def box_muller(rng: np.random.Generator, size: int) -> np.ndarray:
    """Standard normal draws from pairs of uniforms."""
    if size <= 0:
        return np.zeros(0)
    pairs = (size + 1) // 2
    u1 = 1.0 - rng.random(pairs)  # (0, 1], keeps log finite
    u2 = rng.random(pairs)
    radius = np.sqrt(-2.0 * np.log(u1))
    angle = 2.0 * np.pi * u2
    out = np.empty(2 * pairs)
    out[0::2] = radius * np.cos(angle)
    out[1::2] = radius * np.sin(angle)
    return out[:size]


def _check(n: int, T: int, S_T: float):
    is_valid, error = validate_node_count(n, minimum=1, name="n")
    if not is_valid:
        raise InvalidSizeError(error)
    is_valid, error = validate_node_count(T, minimum=2, name="T")
    if not is_valid:
        raise InvalidSizeError(error)
    SmoothnessBudget(S_T)


def gen_smooth_star(n: int, T: int, S_T: float, rng: np.random.Generator) -> StackedSignal:
    """
    Star-graph recipe: the centre x_1 ~ N(0, I/n); with alpha = sqrt(S_T/T) and
    m = min(floor(S_T), T), nodes 2..T-m are N(x_1, alpha^2 I/n) and the last m
    nodes are N(x_1 + 1/sqrt(n), I/n). The centre always keeps x_1.
    """
    _check(n, T, S_T)
    alpha = math.sqrt(S_T / T)
    m = min(int(math.floor(S_T)), T)
    shift = np.full(n, 1.0 / math.sqrt(n))

    z = box_muller(rng, n * T).reshape(T, n) / math.sqrt(n)
    blocks = np.empty((T, n))
    blocks[0] = z[0]
    first_shifted = max(T - m, 1)
    blocks[1:first_shifted] = blocks[0] + alpha * z[1:first_shifted]
    blocks[first_shifted:] = blocks[0] + shift + z[first_shifted:]
    return StackedSignal.from_blocks(blocks)


def gen_smooth_complete(n: int, T: int, S_T: float, rng: np.random.Generator) -> StackedSignal:
    """
    Complete-graph recipe: first floor(T/2) nodes N(0, S_T/(T^2 n) I), the rest
    N(z, S_T/(T^2 n) I) with z = sqrt(S_T)/(T sqrt(n)) * ones.
    """
    _check(n, T, S_T)
    scale = math.sqrt(S_T / (T * T * n))
    z = np.full(n, math.sqrt(S_T) / (T * math.sqrt(n)))
    blocks = scale * box_muller(rng, n * T).reshape(T, n)
    blocks[T // 2:] += z
    return StackedSignal.from_blocks(blocks)


def center_blocks(x: StackedSignal) -> StackedSignal:
    """Subtract each block's mean (apply P = I_T kron (I_n - 11^T/n))."""
    blocks = x.blocks()
    return StackedSignal.from_blocks(blocks - blocks.mean(axis=1, keepdims=True))


def gen_noise(length: int, sigma: float, rng: np.random.Generator) -> np.ndarray:
    """i.i.d. N(0, sigma^2) entries."""
    is_valid, error = validate_nonnegative(sigma, "sigma")
    if not is_valid:
        raise InvalidParameterError(error)
    draws = box_muller(rng, int(length))
    return sigma * draws
