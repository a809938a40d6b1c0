"""
Tests for the spectral lower bound, the error envelope and the mu* rules.
"""
import math
import numpy as np
import pytest

from src.bounds.lemma import (
    BoundInputs,
    bound_inputs_from,
    branch_gap,
    error_bound,
    lambda_bar,
    lambda_bar_prime,
    lambda_bar_prime_grid,
    lemma_regime,
)
from src.bounds.mu_rules import (
    gamma_nT,
    mu_star_complete,
    mu_star_rand_samp,
    mu_star_star_graph,
    mu_star_sync,
    p_sum_condition,
    rate_rand_samp,
    sample_size_condition,
)
from src.core.exceptions import (
    BoundInvariantError,
    DisconnectedGraphError,
    InvalidParameterError,
    SingularSystemError,
)
from src.graph.core import Graph, LaplacianSpectrum, build_complete, build_star
from src.measurement.design import MeasurementSet, gram_summary, sample_er_layers, sample_sparse_rows


def _random_inputs(rng, mu=None):
    b2 = rng.uniform(0.05, 2.0)
    b3 = b2 + rng.uniform(0.01, 5.0)
    b1 = rng.uniform(0.05, 10.0)
    mu = 10 ** rng.uniform(-3, 3) if mu is None else mu
    return BoundInputs(mu=mu, b1=b1, b2=b2, b3=b3)


# ============================================================================
# lambda_bar'
# ============================================================================

def test_small_mu_example():
    inputs = BoundInputs(mu=1.0, b1=1.0, b2=1.0, b3=2.0)
    assert inputs.threshold == pytest.approx(2.5)
    assert lemma_regime(inputs) == "small_mu"
    assert lambda_bar_prime(inputs) == pytest.approx(0.1, rel=1e-12)
    assert lambda_bar_prime_grid(inputs) >= 0.1


def test_closed_form_never_exceeds_grid_minimum():
    rng = np.random.default_rng(7)
    for _ in range(50):
        inputs = _random_inputs(rng)
        assert lambda_bar_prime(inputs) <= lambda_bar_prime_grid(inputs, points=200_001) + 1e-8


def test_branches_meet_at_threshold():
    rng = np.random.default_rng(11)
    for _ in range(100):
        small, large = branch_gap(_random_inputs(rng))
        assert large == pytest.approx(small, rel=1e-9)


def test_large_mu_guarantee():
    rng = np.random.default_rng(3)
    for _ in range(100):
        inputs = _random_inputs(rng)
        mu = (inputs.b2 + inputs.b3 ** 2 / inputs.b2) / inputs.b1 * rng.uniform(1.0, 1e4)
        value = lambda_bar_prime(inputs.with_mu(mu))
        assert value >= inputs.b2 / 4 * (1 - 1e-12)


def test_small_mu_is_linear():
    inputs = BoundInputs(mu=1e-9, b1=2.0, b2=0.5, b3=1.5)
    slope = 0.5 ** 2 * 2.0 / (2 * (0.5 ** 2 + 1.5 ** 2))
    assert lambda_bar_prime(inputs) / 1e-9 == pytest.approx(slope, rel=1e-12)


def test_result_is_positive_across_regimes():
    inputs = BoundInputs(mu=1.0, b1=1.0, b2=0.3, b3=4.0)
    for mu in np.logspace(-4, 4, 17):
        assert lambda_bar_prime(inputs.with_mu(float(mu))) > 0


def test_lambda_bar_uses_block_floor():
    inputs = BoundInputs(mu=1.0, b1=1.0, b2=1.0, b3=2.0, lambda_min_CtC=1.0)
    assert lambda_bar(inputs) == 1.0


def test_invalid_inputs():
    with pytest.raises(BoundInvariantError):
        BoundInputs(mu=1.0, b1=1.0, b2=2.0, b3=2.0)
    with pytest.raises(BoundInvariantError):
        BoundInputs(mu=1.0, b1=0.0, b2=1.0, b3=2.0)
    with pytest.raises(InvalidParameterError):
        BoundInputs(mu=-1.0, b1=1.0, b2=1.0, b3=2.0)
    with pytest.raises(InvalidParameterError):
        lambda_bar_prime(BoundInputs(mu=0.0, b1=1.0, b2=1.0, b3=2.0))


# ============================================================================
# Bound inputs from a problem
# ============================================================================

def test_bound_inputs_complete_full_sampling():
    m = sample_sparse_rows(1, 4, 1.0, np.random.default_rng(0))
    inputs = bound_inputs_from(build_complete(4), gram_summary(m), mu=1.0)
    assert inputs.b1 == pytest.approx(4.0)
    assert inputs.b2 == pytest.approx(1.0)
    assert inputs.b3 == pytest.approx(2.0)


def test_bound_inputs_star_fiedler():
    m = MeasurementSet.from_dense_blocks([np.eye(2)] * 3)
    inputs = bound_inputs_from(build_star(3), gram_summary(m), mu=1.0)
    assert inputs.b1 == pytest.approx(1.0)
    assert inputs.lambda_min_CtC == pytest.approx(1.0)


def test_incidence_requires_sync():
    m = sample_er_layers(3, [1.0, 1.0], np.random.default_rng(0))
    summary = gram_summary(m)
    with pytest.raises(SingularSystemError):
        bound_inputs_from(build_complete(2), summary, mu=1.0)
    inputs = bound_inputs_from(build_complete(2), summary, mu=1.0, sync=True)
    assert inputs.b2 == pytest.approx(3.0)


def test_disconnected_graph_rejected():
    m = MeasurementSet.from_dense_blocks([np.eye(2)] * 3)
    with pytest.raises(DisconnectedGraphError):
        bound_inputs_from(Graph.from_pairs(3, [(0, 1)]), gram_summary(m), mu=1.0)


# ============================================================================
# Error envelope
# ============================================================================

EXAMPLE_INPUTS = BoundInputs(mu=1.0, b1=1.0, b2=1.0, b3=2.0, lambda_min_CtC=1.0)
EXAMPLE_SPECTRUM = LaplacianSpectrum(eigenvalues=np.array([3.0, 3.0, 3.0, 0.0]), source="closed_form")


def test_error_bound_example():
    report = error_bound(EXAMPLE_INPUTS, EXAMPLE_SPECTRUM, n=1, sigma=1.0, design_norm=1.0,
                         S_T=1.0, delta=math.exp(-1))
    assert report.lambda_bar == 1.0
    assert report.bias_bound == pytest.approx(4.0)
    assert report.variance_bound == pytest.approx(47.5)
    assert report.total_bound == pytest.approx(51.5)


def test_error_bound_zero_noise_zero_variation():
    report = error_bound(EXAMPLE_INPUTS, EXAMPLE_SPECTRUM, n=1, sigma=0.0, design_norm=1.0,
                         S_T=0.0, delta=0.05)
    assert report.total_bound == 0.0


def test_error_bound_bias_scales_with_variation():
    one = error_bound(EXAMPLE_INPUTS, EXAMPLE_SPECTRUM, 1, 1.0, 1.0, S_T=1.0, delta=0.05)
    two = error_bound(EXAMPLE_INPUTS, EXAMPLE_SPECTRUM, 1, 1.0, 1.0, S_T=2.0, delta=0.05)
    assert two.bias_bound == pytest.approx(2 * one.bias_bound)
    assert two.variance_bound == pytest.approx(one.variance_bound)


def test_variance_forms():
    delta = math.exp(-2)
    theorem = error_bound(EXAMPLE_INPUTS, EXAMPLE_SPECTRUM, 1, 1.0, 1.0, 1.0, delta)
    lemma = error_bound(EXAMPLE_INPUTS, EXAMPLE_SPECTRUM, 1, 1.0, 1.0, 1.0, delta, variance_form="lemma")
    assert theorem.variance_bound == pytest.approx(95.0)
    assert lemma.variance_bound == pytest.approx(85.5)
    assert lemma.as_dict()["variance_form"] == "lemma"


def test_error_bound_rejects_delta_out_of_range():
    with pytest.raises(InvalidParameterError):
        error_bound(EXAMPLE_INPUTS, EXAMPLE_SPECTRUM, 1, 1.0, 1.0, 1.0, delta=0.5)
    with pytest.raises(InvalidParameterError):
        error_bound(EXAMPLE_INPUTS, EXAMPLE_SPECTRUM, 1, -1.0, 1.0, 1.0, delta=0.05)


# ============================================================================
# mu* rules
# ============================================================================

def test_mu_star_complete_example():
    value = mu_star_complete(lmin=8.0, lmax=8.0, n=1, sigma=1.0, design_norm=1.0, S_T=1.0, T=8, c1=2.0)
    assert value == pytest.approx(2 ** (1 / 3) * 2 / 4 - 0.125, rel=1e-12)


def test_mu_star_complete_returns_constant_branch_without_noise():
    value = mu_star_complete(lmin=8.0, lmax=8.0, n=1, sigma=0.0, design_norm=1.0, S_T=1.0, T=8, c1=2.0)
    assert value == pytest.approx(0.5)


def test_mu_star_complete_noise_scaling():
    kwargs = dict(lmin=8.0, lmax=8.0, n=1, design_norm=1.0, S_T=1.0, T=8, c1=1e-6)
    shift = 8.0 / 64
    low = mu_star_complete(sigma=10.0, **kwargs)
    high = mu_star_complete(sigma=10.0 * math.sqrt(8), **kwargs)
    assert high + shift == pytest.approx(2 * (low + shift), rel=1e-12)


def test_mu_star_star_graph_example():
    value = mu_star_star_graph(lmin=27.0, lmax=27.0, n=1, sigma=1.0, design_norm=1.0, S_T=1.0, T=27, c1=1.0)
    assert value == pytest.approx(3 * 2 ** (1 / 3) - 1, rel=1e-12)
    assert value == pytest.approx(2.7798, abs=1e-4)


def test_mu_star_star_graph_without_noise():
    value = mu_star_star_graph(lmin=27.0, lmax=27.0, n=1, sigma=0.0, design_norm=1.0, S_T=1.0, T=27, c1=1.0)
    assert value == pytest.approx(2.0)


def test_mu_star_rand_samp_example():
    T = 1000
    value = mu_star_rand_samp(theta=0.5, T=T, n=5, sigma=1.0, S_T=math.sqrt(T), c1=2.0)
    expected = (0.5 / (T * math.sqrt(T))) ** (1 / 3) - 0.5 / (T * 5)
    assert value == pytest.approx(expected, rel=1e-12)
    assert value == pytest.approx(0.02503, abs=1e-4)


def test_mu_star_rand_samp_without_noise():
    assert mu_star_rand_samp(0.5, 100, 5, 0.0, 0.0, c1=2.0) == pytest.approx(0.02)
    assert mu_star_rand_samp(0.5, 100, 5, 0.0, 0.0, c1=3.0, graph_kind="star") == pytest.approx(3.0)


def test_mu_star_rand_samp_rejects_bad_inputs():
    with pytest.raises(InvalidParameterError):
        mu_star_rand_samp(0.0, 100, 5, 1.0, 1.0)
    with pytest.raises(InvalidParameterError):
        mu_star_rand_samp(0.5, 100, 5, 1.0, 0.0)
    with pytest.raises(InvalidParameterError):
        mu_star_rand_samp(0.5, 100, 5, 1.0, 1.0, graph_kind="path")


def test_sample_size_condition():
    assert math.ceil(sample_size_condition(0.5, 5, 0.05)) == 369


def test_gamma_example():
    assert gamma_nT(50, 1.0, 1, delta=0.05) == pytest.approx(10.0)


def test_gamma_uses_concentration_when_sparse():
    n, T, p = 400, 10, 0.001
    expected = math.sqrt(2 * n * p) + (2 * n * math.log(n * T / 0.05)) ** 0.25
    assert expected < math.sqrt(2 * n)
    assert gamma_nT(n, p, T, delta=0.05) == pytest.approx(expected)


def test_mu_star_sync_without_noise():
    value = mu_star_sync(p_sum=5.0, gamma=2.0, n=4, sigma=0.0, S_T=0.0, T=10, c2=2.0)
    assert value == pytest.approx(0.2 * (4 * 5.0 / 10 + 4.0))


def test_mu_star_sync_grows_with_noise():
    kwargs = dict(p_sum=5.0, gamma=2.0, n=4, S_T=1.0, T=10, c2=2.0)
    assert mu_star_sync(sigma=50.0, **kwargs) > mu_star_sync(sigma=0.0, **kwargs)


def test_p_sum_condition():
    assert p_sum_condition(10, 0.05) == pytest.approx(math.log(200) / 10)


def test_rate_envelope_decreases_with_T():
    assert rate_rand_samp(0.5, 1000, 5, 1.0, 1.0, 0.05) < rate_rand_samp(0.5, 100, 5, 1.0, 1.0, 0.05)
