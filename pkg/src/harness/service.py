"""
Monte-Carlo experiment runner.

Each (T, trial) cell owns a generator seeded from derive_trial_seed(), runs
measurement sampling, signal generation, observation and estimation, and
returns a TrialRow. Cells run on a thread pool; the calling thread is the
only writer to the result store.
"""

from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Dict, List, Optional, Tuple
import numpy as np
import pandas as pd

from src.bounds.mu_rules import gamma_nT, mu_star_rand_samp, mu_star_sync, rate_rand_samp, rate_sync
from src.core.config import settings
from src.core.logging_config import get_logger
from src.estimator.solver import SolveOptions, solve_penalized, solve_sync
from src.graph.core import build_graph, quadratic_variation
from src.harness.schemas import ExperimentConfig, ExperimentResult, TAggregate, TrialRow
from src.harness.seeding import derive_trial_seed
from src.harness.storage import ResultStore, get_result_store
from src.measurement.design import design_apply, sample_er_layers, sample_sparse_rows
from src.signals.generators import center_blocks, gen_noise, gen_smooth_complete, gen_smooth_star

logger = get_logger("harness")


def choose_mu(cfg: ExperimentConfig, T: int, p_sum: Optional[float] = None, p_max: Optional[float] = None) -> float:
    """Fixed mu, or the corollary rule for the config's graph and measurement model."""
    if cfg.mu_rule == "fixed":
        return float(cfg.mu)
    S_T = cfg.smoothness(T)
    constant = cfg.rule_constant()
    if cfg.measurement_model == "sparse_rows":
        return mu_star_rand_samp(
            cfg.theta, T, cfg.n, cfg.sigma, S_T, c1=constant, graph_kind=cfg.graph_kind, delta=cfg.delta
        )
    p_sum = cfg.p * T if p_sum is None else p_sum
    p_max = cfg.p if p_max is None else p_max
    gamma = gamma_nT(cfg.n, p_max, T, settings.GAMMA_DELTA)
    return mu_star_sync(p_sum, gamma, cfg.n, cfg.sigma, S_T, T, c2=constant, graph_kind=cfg.graph_kind)


def rate_envelope(cfg: ExperimentConfig, T: int) -> Optional[float]:
    """Corollary squared-error envelope at T on the MSE scale (None for the path graph)."""
    if cfg.graph_kind == "path":
        return None
    S_T = cfg.smoothness(T)
    if cfg.measurement_model == "sparse_rows":
        rate = rate_rand_samp(cfg.theta, T, cfg.n, cfg.sigma, S_T, cfg.delta, graph_kind=cfg.graph_kind)
    else:
        gamma = gamma_nT(cfg.n, cfg.p, T, settings.GAMMA_DELTA)
        rate = rate_sync(cfg.p * T, gamma, cfg.n, cfg.sigma, S_T, T, cfg.delta, graph_kind=cfg.graph_kind)
    return rate / T


def run_trial(cfg: ExperimentConfig, T: int, trial_index: int) -> TrialRow:
    """
    One trial at graph size T.

    1. sample the measurement blocks C_t
    2. generate the ground truth (centered for Erdos-Renyi layers)
    3. observe y = C x + eta with eta ~ N(0, sigma^2)
    4. estimate x (plain for sparse rows, centered for layers) and score
       MSE = ||x_hat - x||^2 / T
    """
    seed = derive_trial_seed(cfg.base_seed, T, trial_index)
    rng = np.random.default_rng(seed)
    graph = build_graph(cfg.graph_kind, T)
    S_T = cfg.smoothness(T)

    if cfg.measurement_model == "sparse_rows":
        measurements = sample_sparse_rows(cfg.n, T, cfg.theta, rng)
    else:
        measurements = sample_er_layers(cfg.n, [cfg.p] * T, rng)

    if cfg.graph_kind == "star":
        x = gen_smooth_star(cfg.n, T, S_T, rng)
    else:
        x = gen_smooth_complete(cfg.n, T, S_T, rng)
    if cfg.measurement_model == "er_layers":
        x = center_blocks(x)

    y = design_apply(measurements, x) + gen_noise(measurements.total_rows, cfg.sigma, rng)

    mu = choose_mu(cfg, T, measurements.p_sum, measurements.p_max)
    if cfg.measurement_model == "sparse_rows":
        report = solve_penalized(graph, measurements, y, SolveOptions(mu=mu, allow_rank_deficient=True))
    else:
        report = solve_sync(graph, measurements, y, SolveOptions(mu=mu, mode="centered", allow_rank_deficient=True))

    error = report.estimate.data - x.data
    mse = float(error @ error) / T
    if not report.converged:
        logger.warning(f"Trial T={T} #{trial_index} did not converge (residual {report.final_residual:.3e})")
    return TrialRow(
        T=T,
        trial=trial_index,
        seed=seed,
        mse=mse,
        realized_S_T=quadratic_variation(graph, x),
        mu_used=mu,
        solver_iterations=report.iterations,
        converged=report.converged,
        rank_deficient=report.rank_deficient,
    )


def failed_trial_row(cfg: ExperimentConfig, T: int, trial_index: int, exc: Exception) -> TrialRow:
    """Flagged placeholder for a cell whose trial raised; it carries no MSE."""
    return TrialRow(
        T=T,
        trial=trial_index,
        seed=derive_trial_seed(cfg.base_seed, T, trial_index),
        mse=None,
        realized_S_T=None,
        mu_used=None,
        solver_iterations=0,
        converged=False,
        error=f"{type(exc).__name__}: {exc}",
    )


def aggregate(cfg: ExperimentConfig, rows: List[TrialRow], strict: bool = False) -> List[TAggregate]:
    """
    Per-T mean / median / std of the MSE; strict drops non-converged trials.
    Failed trials have no MSE and only ever count towards `flagged`.
    """
    frame = pd.DataFrame([r.model_dump(exclude={"seed"}) for r in rows])
    aggregates = []
    for T in cfg.T_grid:
        subset = frame[frame["T"] == T] if not frame.empty else frame
        flagged = int((~subset["converged"]).sum()) if not subset.empty else 0
        if strict and not subset.empty:
            subset = subset[subset["converged"]]
        if not subset.empty:
            subset = subset[subset["mse"].notna()]
        mse = subset["mse"].to_numpy(dtype=float) if not subset.empty else np.zeros(0)
        aggregates.append(TAggregate(
            T=T,
            mean_mse=float(np.mean(mse)) if mse.size else None,
            median_mse=float(np.median(mse)) if mse.size else None,
            std_mse=float(np.std(mse, ddof=1)) if mse.size > 1 else (0.0 if mse.size else None),
            trials=int(mse.size),
            flagged=flagged,
            rate_envelope=rate_envelope(cfg, T),
        ))
    return aggregates


def run_experiment(
    cfg: ExperimentConfig,
    store: Optional[ResultStore] = None,
    workers: Optional[int] = None,
    strict: bool = False,
    fresh: bool = False,
) -> ExperimentResult:
    """
    Run every missing (T, trial) cell, persist each as it finishes, and
    aggregate over the stored rows.
    A trial that raises is stored as a flagged row without an MSE and the
    remaining cells still run.

    Args:
        cfg: Experiment configuration
        store: Result store (global store if omitted)
        workers: Pool size (GRAPHSMOOTH_THREADS / CPU count if omitted)
        strict: Exclude non-converged trials from aggregates
        fresh: Drop previously stored cells first

    Returns:
        ExperimentResult with rows sorted by (T, trial)
    """
    store = store or get_result_store()
    key = cfg.key()
    if fresh:
        store.clear(key)

    done = store.completed_cells(key)
    cells: List[Tuple[int, int]] = [
        (T, trial) for T in cfg.T_grid for trial in range(cfg.trials) if (T, trial) not in done
    ]
    total = len(cfg.T_grid) * cfg.trials
    if len(cells) < total:
        logger.info(f"Experiment {key}: resuming, {total - len(cells)} of {total} cells already stored")
    logger.info(f"Experiment {cfg.name or key}: running {len(cells)} cells")

    workers = workers or settings.worker_count()
    if cells:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            futures = {executor.submit(run_trial, cfg, T, trial): (T, trial) for T, trial in cells}
            for future in as_completed(futures):
                T, trial = futures[future]
                try:
                    row = future.result()
                except Exception as e:
                    logger.error(f"Trial T={T} #{trial} failed: {type(e).__name__}: {str(e)}")
                    row = failed_trial_row(cfg, T, trial, e)
                store.save(key, row)

    wanted = {(T, trial) for T in cfg.T_grid for trial in range(cfg.trials)}
    rows = [r for r in store.load_rows(key) if (r.T, r.trial) in wanted]
    rows.sort(key=lambda r: (r.T, r.trial))
    logger.info(f"Experiment {cfg.name or key}: finished with {len(rows)} rows")
    return ExperimentResult(
        config=cfg,
        experiment_key=key,
        version=f"{settings.APP_NAME} {settings.VERSION}",
        strict=strict,
        rows=rows,
        aggregates=aggregate(cfg, rows, strict),
    )


def summarize(result: ExperimentResult) -> Dict[int, float]:
    """T -> median MSE."""
    return {a.T: a.median_mse for a in result.aggregates}
