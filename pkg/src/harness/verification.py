"""
Empirical verification suites.

- verify_lemma: dense lambda_min(mu (L kron I_n) + C^T C) against lambda_bar(mu)
  on small random instances, plus branch continuity at the regime threshold
- verify_sync_lemma: the same check for the centered system P A P with
  incidence measurements, against lambda_{T(n-1)}
- verify_sampling: pass rates of the Gram spectral sandwiches for sparse
  random measurements (prop2) and Erdos-Renyi layers (prop5)
"""

from typing import Dict, List, Literal, Optional
import math
import numpy as np
from pydantic import BaseModel, Field

from src.bounds.lemma import BoundInputs, bound_inputs_from, branch_gap, lambda_bar_prime, max_d1_d2
from src.bounds.mu_rules import gamma_nT, p_sum_condition, sample_size_condition
from src.core.exceptions import InvalidParameterError
from src.core.logging_config import get_logger
from src.estimator.oracle import dense_system
from src.graph.core import build_erdos_renyi, build_graph, laplacian_spectrum
from src.harness.seeding import trial_rng
from src.measurement.design import (
    MeasurementSet,
    gram_eigenvalues,
    gram_summary,
    incidence_block,
    sample_er_layers,
    sample_sparse_rows,
)
from src.utils.eigen import symmetric_eigvalsh

logger = get_logger("harness")

LEMMA_GRAPHS = ("complete", "star", "path")
MU_GRID = np.logspace(-3.0, 3.0, 7)
MARGIN_TOL = 1e-10
CONTINUITY_TOL = 1e-9
MINIMAX_TOL = 1e-9
# uniform in alpha plus a geometric refinement towards alpha = 1, where the
# minimax sits when b3 is much larger than b2
ALPHA_GRID = np.unique(np.concatenate([np.linspace(0.0, 1.0, 20001), 1.0 - np.geomspace(1e-12, 1.0, 20001)]))
_MAX_REDRAWS = 100


class LemmaFailure(BaseModel):
    case: int
    check: Literal["dense", "minimax"] = "dense"
    graph_kind: str
    n: int
    T: int
    mu: float
    dense_value: float
    bound_value: float


class LemmaReport(BaseModel):
    """Outcome of a lemma sweep; a case passes when every mu on its grid passes."""
    variant: Literal["plain", "sync"]
    cases: int
    passes: int
    checks: int
    worst_margin: float
    worst_continuity_gap: float
    corruption: float = 1.0
    failures: List[LemmaFailure] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.passes == self.cases and self.worst_continuity_gap <= CONTINUITY_TOL


class SamplingReport(BaseModel):
    model: Literal["prop2", "prop5"]
    params: Dict[str, float]
    seeds: int
    sandwich_passes: int
    pass_rate: float
    norm_pass_rate: Optional[float] = None
    required_rate: float
    hypotheses_met: bool

    @property
    def passed(self) -> bool:
        rates = [self.pass_rate] + ([self.norm_pass_rate] if self.norm_pass_rate is not None else [])
        return all(rate >= self.required_rate for rate in rates)


def _random_design(n: int, T: int, rng: np.random.Generator) -> MeasurementSet:
    """Gaussian blocks with 0..n rows each, redrawn until lambda_min(O_T^T O_T) > 0."""
    for _ in range(_MAX_REDRAWS):
        blocks = [rng.standard_normal((int(rng.integers(0, n + 1)), n)) for _ in range(T)]
        m = MeasurementSet.from_dense_blocks([b if b.size else np.zeros((0, n)) for b in blocks])
        values = gram_eigenvalues(m)
        if values[-1] > 1e-6 * max(values[0], 1.0):
            return m
    raise InvalidParameterError("Could not draw a full-rank random design")


def _random_incidence(n: int, T: int, rng: np.random.Generator) -> MeasurementSet:
    """Erdos-Renyi incidence layers, redrawn until lambda_{n-1}(O_T^T O_T) > 0."""
    for _ in range(_MAX_REDRAWS):
        p = rng.uniform(0.3, 0.9)
        blocks = [incidence_block(build_erdos_renyi(n, p, rng)) for _ in range(T)]
        m = MeasurementSet(n=n, node_count=T, blocks=tuple(blocks), kind="incidence")
        values = gram_eigenvalues(m)
        if values[-2] > 1e-6 * max(values[0], 1.0):
            return m
    raise InvalidParameterError("Could not draw a connected incidence design")


def _mu_points(inputs: BoundInputs) -> np.ndarray:
    return np.append(MU_GRID, inputs.threshold_mu)


def _alpha_minimax(inputs: BoundInputs) -> float:
    """min over alpha of max{D1, D2}, which lambda_bar' must not exceed."""
    return float(np.min(max_d1_d2(ALPHA_GRID, inputs.mu, inputs.b1, inputs.b2, inputs.b3)))


def _sweep(seed: int, cases: int, corruption: float, sync: bool) -> LemmaReport:
    if cases < 1:
        raise InvalidParameterError(f"cases must be >= 1, got {cases}")
    passes = 0
    checks = 0
    worst_margin = math.inf
    worst_gap = 0.0
    failures: List[LemmaFailure] = []

    for case in range(cases):
        rng = trial_rng(seed, 1 if sync else 0, case)
        kind = LEMMA_GRAPHS[int(rng.integers(0, len(LEMMA_GRAPHS)))]
        if sync:
            n, T = int(rng.integers(3, 5)), int(rng.integers(3, 7))
            m = _random_incidence(n, T, rng)
        else:
            n, T = int(rng.integers(2, 4)), int(rng.integers(3, 9))
            m = _random_design(n, T, rng)
        g = build_graph(kind, T)
        spectrum = laplacian_spectrum(g)
        summary = gram_summary(m)
        base = bound_inputs_from(g, summary, 1.0, sync=sync, spectrum=spectrum)

        small, large = branch_gap(base)
        worst_gap = max(worst_gap, abs(small - large) / max(abs(small), abs(large)))

        case_ok = True
        for mu in _mu_points(base):
            inputs = base.with_mu(float(mu))
            closed = corruption * lambda_bar_prime(inputs)
            minimax = _alpha_minimax(inputs)
            if closed - minimax > MINIMAX_TOL * max(1.0, minimax):
                case_ok = False
                failures.append(LemmaFailure(
                    case=case, check="minimax", graph_kind=kind, n=n, T=T, mu=float(mu),
                    dense_value=minimax, bound_value=closed,
                ))
            bound = max(closed, inputs.lambda_min_CtC)
            values = symmetric_eigvalsh(dense_system(g, m, float(mu), "centered" if sync else "plain"))
            dense = float(values[T * (n - 1) - 1]) if sync else float(values[-1])
            margin = dense - bound
            checks += 1
            worst_margin = min(worst_margin, margin)
            if margin < -MARGIN_TOL * max(1.0, float(values[0])):
                case_ok = False
                failures.append(LemmaFailure(
                    case=case, graph_kind=kind, n=n, T=T, mu=float(mu), dense_value=dense, bound_value=bound,
                ))
        passes += int(case_ok)

    report = LemmaReport(
        variant="sync" if sync else "plain",
        cases=cases,
        passes=passes,
        checks=checks,
        worst_margin=float(worst_margin),
        worst_continuity_gap=float(worst_gap),
        corruption=corruption,
        failures=failures[:20],
    )
    logger.info(
        f"Lemma sweep ({report.variant}): {passes}/{cases} cases passed, worst margin {worst_margin:.3e}, "
        f"continuity gap {worst_gap:.3e}"
    )
    return report


def verify_lemma(seed: int = 0, cases: int = 200, corruption: float = 1.0) -> LemmaReport:
    """
    Lemma validity sweep on random (n, T, graph, C) instances.

    Args:
        seed: Base seed of the instance stream
        cases: Number of random instances
        corruption: Factor applied to lambda_bar' (1.0 for the real check;
            larger values exercise the verifier itself)
    """
    return _sweep(seed, cases, corruption, sync=False)


def verify_sync_lemma(seed: int = 0, cases: int = 100, corruption: float = 1.0) -> LemmaReport:
    """Centered-system variant with incidence measurements."""
    return _sweep(seed, cases, corruption, sync=True)


def verify_sampling(
    model: Literal["prop2", "prop5"],
    params: Dict[str, float],
    seeds: int = 200,
    seed: int = 0,
    required_rate: Optional[float] = None,
) -> SamplingReport:
    """
    Empirical pass rate of the Gram spectral sandwich.

    prop2 params: n, theta, delta, T (T defaults to ceil((8n/theta) log(n/delta)))
        theta T/(2n) <= lambda_min and lambda_max <= 2 e theta T / n
    prop5 params: n, T, p, delta
        n p_sum/2 <= lambda_{n-1} and lambda_max <= 3 n p_sum / 2, plus ||C||_2 <= gamma_{n,T}
    """
    if seeds < 1:
        raise InvalidParameterError(f"seeds must be >= 1, got {seeds}")
    params = dict(params)
    n = int(params.get("n", 5))
    delta = float(params.get("delta", 0.05))

    if model == "prop2":
        theta = float(params.get("theta", 0.5))
        needed = sample_size_condition(theta, n, delta)
        T = int(params.get("T") or math.ceil(needed))
        params.update(n=n, theta=theta, delta=delta, T=T)
        hypotheses = T >= needed
        if not hypotheses:
            logger.warning(f"prop2: T={T} is below (8n/theta)log(n/delta) = {needed:.1f}")
        lower, upper = theta * T / (2.0 * n), 2.0 * math.e * theta * T / n
        passes = 0
        for s in range(seeds):
            values = gram_eigenvalues(sample_sparse_rows(n, T, theta, trial_rng(seed, T, s)))
            passes += int(lower <= values[-1] and values[0] <= upper)
        rate = passes / seeds
        report = SamplingReport(
            model=model, params=params, seeds=seeds, sandwich_passes=passes, pass_rate=rate,
            required_rate=0.90 if required_rate is None else required_rate, hypotheses_met=hypotheses,
        )
    elif model == "prop5":
        T = int(params.get("T", 50))
        p = float(params.get("p", 0.05))
        params.update(n=n, T=T, p=p, delta=delta)
        p_sum = p * T
        hypotheses = p_sum >= p_sum_condition(n, delta)
        if not hypotheses:
            logger.warning(f"prop5: p_sum={p_sum:.3g} is below log(n/delta)/n")
        gamma = gamma_nT(n, p, T, delta)
        lower, upper = n * p_sum / 2.0, 3.0 * n * p_sum / 2.0
        passes = 0
        norm_passes = 0
        for s in range(seeds):
            summary = gram_summary(sample_er_layers(n, [p] * T, trial_rng(seed, T, s)))
            passes += int(lower <= summary.lambda_second_min and summary.lambda_max <= upper)
            norm_passes += int(summary.design_norm <= gamma)
        report = SamplingReport(
            model=model, params=params, seeds=seeds, sandwich_passes=passes, pass_rate=passes / seeds,
            norm_pass_rate=norm_passes / seeds,
            required_rate=0.95 if required_rate is None else required_rate, hypotheses_met=hypotheses,
        )
    else:
        raise InvalidParameterError(f"Unknown sampling model {model!r}; expected 'prop2' or 'prop5'")

    logger.info(f"{model}: sandwich held in {report.sandwich_passes}/{seeds} seeds")
    return report
