"""
Closed-form spectral lower bound lambda_bar'(mu) and the bias/variance
error envelope built on it.

    b1: lower bound on the Fiedler value of the graph
    b2: lambda_min(O_T^T O_T) / T   (lambda_{n-1} for synchronization)
    b3: 2 ||C||_2 sqrt(lambda_max(O_T^T O_T) / T)
"""

from dataclasses import dataclass
from typing import Literal, Optional, Tuple
import math
import numpy as np

from src.core.config import settings
from src.core.exceptions import (
    BoundInvariantError,
    DisconnectedGraphError,
    InvalidParameterError,
    SingularSystemError,
    UnderdeterminedSystemError,
)
from src.core.logging_config import get_logger
from src.graph.core import Graph, LaplacianSpectrum, laplacian_spectrum
from src.measurement.design import GramSummary
from src.utils.validators import validate_confidence, validate_nonnegative, validate_positive

logger = get_logger("bounds")

Regime = Literal["small_mu", "large_mu"]
VarianceForm = Literal["theorem", "lemma"]


@dataclass(frozen=True)
class BoundInputs:
    mu: float
    b1: float
    b2: float
    b3: float
    lambda_min_CtC: float = 0.0

    def __post_init__(self):
        is_valid, error = validate_nonnegative(self.mu, "mu")
        if not is_valid:
            raise InvalidParameterError(error)
        for name in ("b1", "b2", "b3"):
            is_valid, error = validate_positive(getattr(self, name), name)
            if not is_valid:
                raise BoundInvariantError(error)
        if self.b2 >= self.b3:
            raise BoundInvariantError(f"b2 must be < b3, got b2={self.b2}, b3={self.b3}")
        is_valid, error = validate_nonnegative(self.lambda_min_CtC, "lambda_min_CtC")
        if not is_valid:
            raise BoundInvariantError(error)

    def with_mu(self, mu: float) -> "BoundInputs":
        return BoundInputs(mu=mu, b1=self.b1, b2=self.b2, b3=self.b3, lambda_min_CtC=self.lambda_min_CtC)

    @property
    def threshold(self) -> float:
        """Value of mu*b1 at which the large-mu branch takes over."""
        return self.b2 + (self.b3 ** 2 - self.b2 ** 2) / (2.0 * self.b2)

    @property
    def threshold_mu(self) -> float:
        return self.threshold / self.b1


@dataclass(frozen=True)
class BoundReport:
    lambda_bar_prime: float
    lambda_bar: float
    regime: Regime
    bias_bound: float
    variance_bound: float
    total_bound: float
    delta: float
    variance_form: VarianceForm = "theorem"

    def as_dict(self) -> dict:
        return {
            "lambda_bar_prime": self.lambda_bar_prime,
            "lambda_bar": self.lambda_bar,
            "regime": self.regime,
            "bias_bound": self.bias_bound,
            "variance_bound": self.variance_bound,
            "total_bound": self.total_bound,
            "delta": self.delta,
            "variance_form": self.variance_form,
        }


def small_mu_branch(mu: float, b1: float, b2: float, b3: float) -> float:
    return b2 ** 2 / (2.0 * (b2 ** 2 + b3 ** 2)) * mu * b1


def large_mu_branch(mu: float, b1: float, b2: float, b3: float) -> float:
    d = mu * b1 - b2
    root = math.hypot(b3, d)
    # 1 - d/root written without cancellation for large d
    if d > 0:
        one_minus = b3 ** 2 / (root * (root + d))
    else:
        one_minus = 1.0 - d / root
    return 0.25 * one_minus * mu * b1 + b2 / 4.0 + (b2 * d - b3 ** 2) / (4.0 * root)


def lemma_regime(inputs: BoundInputs) -> Regime:
    return "small_mu" if inputs.mu * inputs.b1 < inputs.threshold else "large_mu"


def lambda_bar_prime(inputs: BoundInputs) -> float:
    """
    Two-branch closed form of the lower bound on the smallest eigenvalue
    of mu (L kron I_n) + C^T C. The large-mu branch is used at the threshold.

    Raises:
        InvalidParameterError: mu <= 0
    """
    if inputs.mu <= 0.0:
        raise InvalidParameterError(f"mu must be > 0, got {inputs.mu}")
    if lemma_regime(inputs) == "small_mu":
        return small_mu_branch(inputs.mu, inputs.b1, inputs.b2, inputs.b3)
    return large_mu_branch(inputs.mu, inputs.b1, inputs.b2, inputs.b3)


def lambda_bar(inputs: BoundInputs) -> float:
    return max(lambda_bar_prime(inputs), inputs.lambda_min_CtC)


def max_d1_d2(alpha, mu: float, b1: float, b2: float, b3: float):
    """max{D1(alpha), D2(alpha)} with D1 = (1-alpha) mu b1, D2 = alpha b2 - sqrt(alpha(1-alpha)) b3."""
    alpha = np.asarray(alpha, dtype=float)
    d1 = (1.0 - alpha) * mu * b1
    d2 = alpha * b2 - np.sqrt(np.clip(alpha * (1.0 - alpha), 0.0, None)) * b3
    return np.maximum(d1, d2)


def lambda_bar_prime_grid(inputs: BoundInputs, points: int = 1_000_001) -> float:
    """Numerical min over alpha in [0, 1] of max{D1, D2} on a uniform grid."""
    alpha = np.linspace(0.0, 1.0, points)
    return float(np.min(max_d1_d2(alpha, inputs.mu, inputs.b1, inputs.b2, inputs.b3)))


def bound_inputs_from(
    g: Graph,
    summary: GramSummary,
    mu: float,
    sync: bool = False,
    spectrum: Optional[LaplacianSpectrum] = None,
) -> BoundInputs:
    """
    Derive (b1, b2, b3, lambda_min(C^T C)) from a graph and a Gram summary.

    Args:
        g: Connected graph on T vertices
        summary: gram_summary() of the measurement set
        mu: Penalty
        sync: Use the centered (synchronization) quantities lambda_{n-1}
        spectrum: Precomputed Laplacian spectrum of g

    Returns:
        BoundInputs
    """
    if not g.is_connected():
        raise DisconnectedGraphError(
            f"Graph has {g.component_count()} connected components; bounds need a connected graph"
        )
    T = g.vertex_count
    spectrum = spectrum or laplacian_spectrum(g)
    relevant = summary.lambda_second_min if sync else summary.lambda_min
    floor = settings.RANK_REL_TOL * max(summary.lambda_max, 0.0)
    if relevant <= floor:
        if sync:
            raise UnderdeterminedSystemError(
                f"lambda_(n-1)(O_T^T O_T) = {relevant:.3e} is zero; rank(O_T) < n - 1"
            )
        raise SingularSystemError(f"lambda_min(O_T^T O_T) = {relevant:.3e} is zero; rank(O_T) < n")

    b1 = spectrum.fiedler
    b2 = relevant / T
    b3 = 2.0 * summary.design_norm * math.sqrt(summary.lambda_max / T)
    lambda_ctc = summary.block_lambda_second_min if sync else summary.block_lambda_min
    return BoundInputs(mu=mu, b1=b1, b2=b2, b3=b3, lambda_min_CtC=max(lambda_ctc, 0.0))


def _variance_sum(lam: float, mu: float, spectrum: LaplacianSpectrum) -> float:
    # lambda_1..lambda_{T-1}, i.e. every eigenvalue except the smallest
    values = spectrum.eigenvalues[:-1]
    return float(np.sum(1.0 / (lam + mu * values) ** 2) + 1.0 / lam ** 2)


def variance_bound(
    lam: float,
    mu: float,
    spectrum: LaplacianSpectrum,
    n: int,
    sigma: float,
    design_norm: float,
    delta: float,
    form: VarianceForm = "theorem",
) -> float:
    """
    High-probability bound on the variance term E2.

    form="theorem": 40 n sigma^2 ||C||^2 S log(1/delta)
    form="lemma":    8 n sigma^2 ||C||^2 S (1 + 4 log(1/delta))
    with S = sum_{t<T} 1/(lam + mu lambda_t)^2 + 1/lam^2.
    """
    total = _variance_sum(lam, mu, spectrum)
    scale = n * sigma ** 2 * design_norm ** 2 * total
    log_term = math.log(1.0 / delta)
    if form == "theorem":
        return 40.0 * scale * log_term
    if form == "lemma":
        return 8.0 * scale * (1.0 + 4.0 * log_term)
    raise InvalidParameterError(f"Unknown variance form {form!r}; expected 'theorem' or 'lemma'")


def error_bound(
    inputs: BoundInputs,
    spectrum: LaplacianSpectrum,
    n: int,
    sigma: float,
    design_norm: float,
    S_T: float,
    delta: float,
    variance_form: VarianceForm = "theorem",
) -> BoundReport:
    """Bias bound 4 mu S_T / lambda_bar plus the variance bound."""
    is_valid, error = validate_confidence(delta)
    if not is_valid:
        raise InvalidParameterError(error)
    for value, name in ((sigma, "sigma"), (S_T, "S_T"), (design_norm, "design_norm")):
        is_valid, error = validate_nonnegative(value, name)
        if not is_valid:
            raise InvalidParameterError(error)

    prime = lambda_bar_prime(inputs)
    lam = max(prime, inputs.lambda_min_CtC)
    bias = 4.0 * inputs.mu * S_T / lam
    variance = variance_bound(lam, inputs.mu, spectrum, n, sigma, design_norm, delta, variance_form)
    logger.debug(
        f"Bound at mu={inputs.mu:.4g}: lambda_bar={lam:.4g}, bias={bias:.4g}, variance={variance:.4g}"
    )
    return BoundReport(
        lambda_bar_prime=prime,
        lambda_bar=lam,
        regime=lemma_regime(inputs),
        bias_bound=bias,
        variance_bound=variance,
        total_bound=bias + variance,
        delta=delta,
        variance_form=variance_form,
    )


def branch_gap(inputs: BoundInputs) -> Tuple[float, float]:
    """Both branches evaluated at the regime threshold (for continuity checks)."""
    mu = inputs.threshold_mu
    return (
        small_mu_branch(mu, inputs.b1, inputs.b2, inputs.b3),
        large_mu_branch(mu, inputs.b1, inputs.b2, inputs.b3),
    )
