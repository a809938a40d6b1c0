"""
Tests for the conjugate-gradient estimators against the dense oracles.
"""
import logging
import math
from types import SimpleNamespace

import numpy as np
import pytest

from src.bounds.lemma import bound_inputs_from, lambda_bar, variance_bound
from src.core.config import settings
from src.core.exceptions import (
    DimensionMismatchError,
    InvalidParameterError,
    InvalidSizeError,
    SingularSystemError,
    SizeLimitError,
    UnderdeterminedSystemError,
)
import src.estimator.solver as solver_module
from src.estimator.oracle import centering_matrix, dense_oracle_solve, dense_system
from src.estimator.solver import (
    SolveOptions,
    bias_variance_split,
    rank_condition,
    solve,
    solve_penalized,
    solve_sync,
)
from src.graph.core import (
    StackedSignal,
    build_complete,
    build_path,
    build_star,
    laplacian_spectrum,
    quadratic_variation,
)
from src.measurement.design import MeasurementSet, design_apply, gram_summary, sample_er_layers


def _plain_problem(rng, n=3, T=6):
    blocks = [np.eye(n) + 0.2 * rng.standard_normal((n, n)) for _ in range(T)]
    return MeasurementSet.from_dense_blocks(blocks)


def _sync_problem(rng, n=4, T=5, p=0.7):
    while True:
        m = sample_er_layers(n, [p] * T, rng)
        if rank_condition(m, "centered")[0]:
            return m


def _relative_gap(a, b):
    return np.linalg.norm(a - b) / np.linalg.norm(b)


# ============================================================================
# Plain estimator
# ============================================================================

@pytest.mark.parametrize("builder", [build_path, build_star, build_complete])
def test_plain_matches_dense_oracle(rng, builder):
    m = _plain_problem(rng)
    g = builder(m.node_count)
    y = rng.standard_normal(m.total_rows)
    report = solve_penalized(g, m, y, SolveOptions(mu=0.7, rel_tol=1e-12))
    oracle = dense_oracle_solve(g, m, y, mu=0.7)
    assert report.converged
    assert _relative_gap(report.estimate.data, oracle.data) <= 1e-8


def test_plain_exact_recovery_of_block_constant_signal(rng):
    m = _plain_problem(rng, n=2, T=6)
    x = StackedSignal.from_blocks(np.tile([1.5, -0.5], (6, 1)))
    y = design_apply(m, x)
    report = solve_penalized(build_path(6), m, y, SolveOptions(mu=2.0))
    np.testing.assert_allclose(report.estimate.data, x.data, atol=1e-8)


def test_zero_observations_give_zero_estimate(rng):
    m = _plain_problem(rng)
    report = solve_penalized(build_star(6), m, np.zeros(m.total_rows), SolveOptions(mu=1.0))
    assert report.iterations == 0
    assert report.converged
    assert not report.estimate.data.any()


def test_jacobi_preconditioner_agrees(rng):
    m = _plain_problem(rng)
    g = build_path(6)
    y = rng.standard_normal(m.total_rows)
    plain = solve_penalized(g, m, y, SolveOptions(mu=5.0, rel_tol=1e-12))
    scaled = solve_penalized(g, m, y, SolveOptions(mu=5.0, rel_tol=1e-12, preconditioner="jacobi"))
    assert _relative_gap(scaled.estimate.data, plain.estimate.data) <= 1e-8


def test_iteration_cap_reports_non_convergence(rng):
    m = _plain_problem(rng)
    y = rng.standard_normal(m.total_rows)
    report = solve_penalized(build_path(6), m, y, SolveOptions(mu=1.0, max_iters=1))
    assert not report.converged
    assert report.iterations == 1
    assert report.final_residual > 0


def test_rank_deficient_design(rng):
    m = MeasurementSet.from_dense_blocks([[[1.0, 0.0]]] * 3)
    y = np.array([1.0, 2.0, 3.0])
    with pytest.raises(SingularSystemError):
        solve_penalized(build_path(3), m, y, SolveOptions(mu=1.0))

    report = solve_penalized(build_path(3), m, y, SolveOptions(mu=1.0, allow_rank_deficient=True))
    assert report.rank_deficient
    np.testing.assert_allclose(report.estimate.blocks()[:, 1], 0.0, atol=1e-12)


def test_dimension_mismatch(rng):
    m = _plain_problem(rng, T=4)
    with pytest.raises(DimensionMismatchError):
        solve_penalized(build_path(5), m, np.zeros(m.total_rows), SolveOptions(mu=1.0))


# ============================================================================
# Centered (synchronization) estimator
# ============================================================================

def test_sync_matches_pseudoinverse_oracle(rng):
    m = _sync_problem(rng)
    g = build_complete(m.node_count)
    y = rng.standard_normal(m.total_rows)
    report = solve_sync(g, m, y, SolveOptions(mu=0.5, rel_tol=1e-12, mode="centered"))
    oracle = dense_oracle_solve(g, m, y, mu=0.5, mode="centered")
    assert _relative_gap(report.estimate.data, oracle.data) <= 1e-8


def test_sync_estimate_is_centered(rng):
    m = _sync_problem(rng)
    y = rng.standard_normal(m.total_rows)
    report = solve(build_path(m.node_count), m, y, SolveOptions(mu=1.0, mode="centered"))
    np.testing.assert_allclose(report.estimate.blocks().mean(axis=1), 0.0, atol=1e-10)


def test_sync_exact_recovery(rng):
    n, T = 4, 5
    m = sample_er_layers(n, [1.0] * T, rng)
    base = np.array([2.0, -1.0, 0.5, -1.5])
    x = StackedSignal.from_blocks(np.tile(base, (T, 1)))
    report = solve_sync(build_complete(T), m, design_apply(m, x), SolveOptions(mu=1.0))
    np.testing.assert_allclose(report.estimate.data, x.data, atol=1e-8)


def test_sync_is_blind_to_per_node_shifts(rng):
    m = _sync_problem(rng)
    x = StackedSignal(4, 5, rng.standard_normal(20))
    shifted = StackedSignal.from_blocks(x.blocks() + rng.standard_normal((5, 1)))
    np.testing.assert_allclose(design_apply(m, shifted), design_apply(m, x), atol=1e-12)


def test_sync_orientation_invariance(rng):
    m = sample_er_layers(4, [1.0] * 4, rng)
    y = rng.standard_normal(m.total_rows)
    flipped_blocks = [b.toarray() for b in m.blocks]
    flipped_blocks[0][0] *= -1.0
    flipped_y = y.copy()
    flipped_y[0] *= -1.0
    flipped = MeasurementSet.from_dense_blocks(flipped_blocks)

    g = build_star(4)
    opts = SolveOptions(mu=1.0, mode="centered")
    original = solve_sync(g, m, y, opts)
    reoriented = solve_sync(g, flipped, flipped_y, opts)
    np.testing.assert_allclose(reoriented.estimate.data, original.estimate.data, atol=1e-12)


def test_sync_under_determined(rng):
    m = sample_er_layers(3, [0.0] * 4, rng)
    with pytest.raises(UnderdeterminedSystemError):
        solve_sync(build_path(4), m, np.zeros(0), SolveOptions(mu=1.0))


def test_sync_needs_two_coordinates():
    m = MeasurementSet.from_dense_blocks([[[1.0]]] * 3)
    with pytest.raises(InvalidSizeError):
        solve_sync(build_path(3), m, np.ones(3), SolveOptions(mu=1.0))


# ============================================================================
# Bias / variance split
# ============================================================================

def test_split_without_noise_has_no_variance(rng):
    m = _plain_problem(rng)
    x = StackedSignal(3, 6, rng.standard_normal(18))
    E1, E2 = bias_variance_split(build_star(6), m, x, np.zeros(m.total_rows), SolveOptions(mu=1.0))
    assert E2 == 0.0
    assert E1 > 0.0


def test_split_without_variation_has_no_bias(rng):
    m = _plain_problem(rng)
    x = StackedSignal.from_blocks(np.tile([1.0, 2.0, 3.0], (6, 1)))
    E1, E2 = bias_variance_split(build_star(6), m, x, rng.standard_normal(m.total_rows), SolveOptions(mu=1.0))
    assert E1 == 0.0
    assert E2 > 0.0


def test_split_bias_respects_bound(rng):
    g = build_star(6)
    for mu in (0.05, 0.5, 5.0):
        m = _plain_problem(rng, n=2)
        x = StackedSignal(2, 6, rng.standard_normal(12))
        E1, _ = bias_variance_split(g, m, x, np.zeros(m.total_rows), SolveOptions(mu=mu))
        inputs = bound_inputs_from(g, gram_summary(m), mu)
        assert E1 <= 4 * mu * quadratic_variation(g, x) / lambda_bar(inputs)


def test_split_error_identity(rng):
    m = _plain_problem(rng)
    g = build_path(6)
    x = StackedSignal(3, 6, rng.standard_normal(18))
    eta = 0.3 * rng.standard_normal(m.total_rows)
    opts = SolveOptions(mu=0.8, rel_tol=1e-12)
    E1, E2 = bias_variance_split(g, m, x, eta, opts)
    estimate = solve_penalized(g, m, design_apply(m, x) + eta, opts).estimate
    error = estimate.data - x.data
    assert error @ error <= E1 + E2 + 1e-8


def test_split_agrees_with_direct_solve(rng, caplog):
    m = _plain_problem(rng)
    x = StackedSignal(3, 6, rng.standard_normal(18))
    eta = 0.3 * rng.standard_normal(m.total_rows)
    with caplog.at_level(logging.WARNING, logger="estimator"):
        bias_variance_split(build_path(6), m, x, eta, SolveOptions(mu=0.8, rel_tol=1e-12))
    assert "split disagrees" not in caplog.text


def test_split_flags_a_wrong_estimate(rng, caplog, monkeypatch):
    m = _plain_problem(rng)
    x = StackedSignal(3, 6, rng.standard_normal(18))
    eta = 0.3 * rng.standard_normal(m.total_rows)

    def shifted_solve(g, m, y, opts):
        report = solve_penalized(g, m, y, opts)
        return SimpleNamespace(estimate=StackedSignal(3, 6, report.estimate.data + 0.5))

    monkeypatch.setattr(solver_module, "solve", shifted_solve)
    with caplog.at_level(logging.WARNING, logger="estimator"):
        bias_variance_split(build_path(6), m, x, eta, SolveOptions(mu=0.8))
    assert "split disagrees" in caplog.text


@pytest.mark.slow
def test_bias_bound_sweep():
    rng = np.random.default_rng(505)
    builders = (build_path, build_star, build_complete)
    for instance in range(100):
        n, T = int(rng.integers(2, 4)), int(rng.integers(3, 9))
        g = builders[instance % 3](T)
        m = _plain_problem(rng, n=n, T=T)
        mu = float(10.0 ** rng.uniform(-2.0, 2.0))
        x = StackedSignal(n, T, rng.standard_normal(n * T))
        E1, _ = bias_variance_split(g, m, x, np.zeros(m.total_rows), SolveOptions(mu=mu))
        inputs = bound_inputs_from(g, gram_summary(m), mu)
        assert E1 <= 4 * mu * quadratic_variation(g, x) / lambda_bar(inputs) + 1e-8


@pytest.mark.slow
def test_variance_bound_sweep():
    delta = math.exp(-2.0)
    sigma = 0.5
    rng = np.random.default_rng(606)
    builders = (build_path, build_star, build_complete)
    for instance in range(20):
        m = _plain_problem(rng)
        g = builders[instance % 3](m.node_count)
        mu = (0.1, 1.0, 10.0)[(instance // 3) % 3]
        summary = gram_summary(m)
        inputs = bound_inputs_from(g, summary, mu)
        bound = variance_bound(
            lambda_bar(inputs), mu, laplacian_spectrum(g), m.n, sigma, summary.design_norm, delta, form="lemma"
        )
        opts = SolveOptions(mu=mu)
        exceeded = 0
        for _ in range(500):
            eta = sigma * rng.standard_normal(m.total_rows)
            noise_part = solve_penalized(g, m, eta, opts).estimate.data
            exceeded += int(2.0 * float(noise_part @ noise_part) > bound)
        assert exceeded <= 25


@pytest.mark.slow
def test_oracle_equivalence_sweep():
    rng = np.random.default_rng(2718)
    builders = (build_path, build_star, build_complete)
    for instance in range(100):
        n = int(rng.integers(2, 5))
        T = int(rng.integers(3, 48 // n + 1))
        g = builders[instance % 3](T)
        mu = float(10.0 ** rng.uniform(-0.5, 0.5))

        m = _plain_problem(rng, n=n, T=T)
        y = rng.standard_normal(m.total_rows)
        report = solve_penalized(g, m, y, SolveOptions(mu=mu, rel_tol=1e-13))
        assert _relative_gap(report.estimate.data, dense_oracle_solve(g, m, y, mu=mu).data) <= 1e-8

        m = _sync_problem(rng, n=n, T=T, p=0.8)
        y = rng.standard_normal(m.total_rows)
        report = solve_sync(g, m, y, SolveOptions(mu=mu, rel_tol=1e-13))
        oracle = dense_oracle_solve(g, m, y, mu=mu, mode="centered")
        assert _relative_gap(report.estimate.data, oracle.data) <= 1e-8


# ============================================================================
# Dense oracle
# ============================================================================

def test_oracle_identity_design_small_mu(rng):
    m = MeasurementSet.from_dense_blocks([np.eye(2)] * 4)
    y = rng.standard_normal(8)
    x = dense_oracle_solve(build_path(4), m, y, mu=1e-8)
    np.testing.assert_allclose(x.data, y, atol=1e-6)


def test_centering_matrix_is_projection():
    p = centering_matrix(3, 2)
    np.testing.assert_allclose(p @ p, p, atol=1e-14)
    np.testing.assert_allclose(p @ np.ones(6), 0.0, atol=1e-14)


def test_dense_system_is_symmetric(rng):
    m = _plain_problem(rng)
    a = dense_system(build_star(6), m, mu=1.3)
    np.testing.assert_array_equal(a, a.T)


def test_oracle_size_limit(rng, monkeypatch):
    monkeypatch.setattr(settings, "DENSE_ORACLE_MAX_SIZE", 4)
    m = MeasurementSet.from_dense_blocks([np.eye(2)] * 4)
    with pytest.raises(SizeLimitError):
        dense_oracle_solve(build_path(4), m, np.zeros(8), mu=1.0)


# ============================================================================
# Options
# ============================================================================

def test_invalid_options():
    with pytest.raises(InvalidParameterError):
        SolveOptions(mu=0.0)
    with pytest.raises(InvalidParameterError):
        SolveOptions(mu=1.0, rel_tol=1.0)
    with pytest.raises(InvalidParameterError):
        SolveOptions(mu=1.0, mode="centered", preconditioner="jacobi")
    with pytest.raises(InvalidParameterError):
        SolveOptions(mu=1.0, mode="projected")


def test_default_tolerance_and_cap():
    opts = SolveOptions(mu=1.0)
    assert opts.tolerance == settings.CG_REL_TOL
    assert opts.iteration_cap(12) == settings.CG_MAX_ITERS_FACTOR * 12
