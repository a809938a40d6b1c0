"""
Matrix-free conjugate-gradient solver for the penalized normal equations

    plain:    (mu M^T M + C^T C) x = C^T y
    centered: P (mu M^T M + C^T C) P u = P C^T y,   x = P u

where M^T M = L kron I_n and P = I_T kron (I_n - 11^T / n).
"""

from dataclasses import dataclass, field, replace
from typing import Literal, Optional, Tuple
import numpy as np
from scipy.sparse.linalg import LinearOperator, cg

from src.core.config import settings
from src.core.exceptions import (
    DimensionMismatchError,
    InvalidParameterError,
    InvalidSizeError,
    SingularSystemError,
    UnderdeterminedSystemError,
)
from src.core.logging_config import get_logger
from src.graph.core import Graph, StackedSignal
from src.measurement.design import MeasurementSet, design_apply, design_apply_transpose, gram_eigenvalues
from src.utils.validators import validate_positive

logger = get_logger("estimator")

SolveMode = Literal["plain", "centered"]
Preconditioner = Literal["none", "jacobi"]

# Relative agreement required between the split solves and a direct solve
SPLIT_CHECK_TOL = 1e-6


@dataclass(frozen=True)
class SolveOptions:
    """
    Solver settings.

    Args:
        mu: Penalty (> 0)
        rel_tol: Relative residual tolerance, defaults to CG_REL_TOL
        max_iters: Iteration cap, defaults to CG_MAX_ITERS_FACTOR * nT
        mode: "plain" or "centered"
        preconditioner: "none" or "jacobi"
        allow_rank_deficient: Solve anyway when the Gram rank condition fails;
            CG from zero then returns the minimum-norm solution
    """
    mu: float
    rel_tol: Optional[float] = None
    max_iters: Optional[int] = None
    mode: SolveMode = "plain"
    preconditioner: Preconditioner = "none"
    allow_rank_deficient: bool = False

    def __post_init__(self):
        is_valid, error = validate_positive(self.mu, "mu")
        if not is_valid:
            raise InvalidParameterError(error)
        if self.rel_tol is not None and not (0.0 < self.rel_tol < 1.0):
            raise InvalidParameterError(f"rel_tol must lie in (0, 1), got {self.rel_tol}")
        if self.max_iters is not None and self.max_iters < 1:
            raise InvalidParameterError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.mode not in ("plain", "centered"):
            raise InvalidParameterError(f"Unknown mode {self.mode!r}; expected 'plain' or 'centered'")
        if self.preconditioner not in ("none", "jacobi"):
            raise InvalidParameterError(f"Unknown preconditioner {self.preconditioner!r}")
        # a diagonal scaling does not commute with P
        if self.mode == "centered" and self.preconditioner != "none":
            raise InvalidParameterError("The Jacobi preconditioner is only available in plain mode")

    @property
    def tolerance(self) -> float:
        return settings.CG_REL_TOL if self.rel_tol is None else self.rel_tol

    def iteration_cap(self, size: int) -> int:
        return self.max_iters if self.max_iters is not None else settings.CG_MAX_ITERS_FACTOR * size


@dataclass(frozen=True)
class SolveReport:
    estimate: StackedSignal
    iterations: int
    final_residual: float
    converged: bool
    rank_deficient: bool = False
    restarts: int = 0
    rhs_norm: float = field(default=0.0, repr=False)


def _check_problem(g: Graph, m: MeasurementSet):
    if g.vertex_count != m.node_count:
        raise DimensionMismatchError(
            f"Graph has {g.vertex_count} vertices but measurements cover {m.node_count} nodes"
        )


def _project(data: np.ndarray, n: int) -> np.ndarray:
    blocks = data.reshape(-1, n)
    return (blocks - blocks.mean(axis=1, keepdims=True)).reshape(-1)


def rank_condition(m: MeasurementSet, mode: SolveMode) -> Tuple[bool, float]:
    """
    Whether the Gram condition holds for the mode.

    Returns:
        (holds, relevant eigenvalue) with lambda_min for plain and
        lambda_{n-1} for centered
    """
    values = gram_eigenvalues(m)
    floor = settings.RANK_REL_TOL * max(float(values[0]), 0.0)
    if mode == "plain":
        relevant = float(values[-1])
    else:
        relevant = float(values[-2]) if values.size >= 2 else 0.0
    return relevant > floor and relevant > 0.0, relevant


def penalized_operator(g: Graph, m: MeasurementSet, mu: float, mode: SolveMode = "plain") -> LinearOperator:
    """A = mu (L kron I_n) + C^T C (wrapped as P A P in centered mode)."""
    n = m.n
    size = n * m.node_count
    design = m.design
    design_t = design.T.tocsr()

    def plain(v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float).reshape(-1)
        return mu * g.apply_laplacian(v, n) + design_t @ (design @ v)

    if mode == "plain":
        return LinearOperator((size, size), matvec=plain, dtype=float)

    def centered(v: np.ndarray) -> np.ndarray:
        return _project(plain(_project(np.asarray(v, dtype=float).reshape(-1), n)), n)

    return LinearOperator((size, size), matvec=centered, dtype=float)


def _jacobi_preconditioner(g: Graph, m: MeasurementSet, mu: float) -> LinearOperator:
    design = m.design
    diag = mu * np.repeat(g.degrees().astype(float), m.n)
    diag += np.asarray(design.multiply(design).sum(axis=0)).reshape(-1)
    inverse = np.where(diag > 0.0, 1.0 / np.where(diag > 0.0, diag, 1.0), 1.0)
    size = diag.size
    return LinearOperator((size, size), matvec=lambda v: inverse * np.asarray(v).reshape(-1), dtype=float)


def _cg_solve(
    operator: LinearOperator,
    rhs: np.ndarray,
    tol: float,
    max_iters: int,
    preconditioner: Optional[LinearOperator] = None,
    project=None,
) -> Tuple[np.ndarray, int, float, int]:
    """
    CG from zero with restarts on the true residual.

    Returns:
        (solution, iterations, final residual norm, restarts)
    """
    rhs_norm = float(np.linalg.norm(rhs))
    x = np.zeros_like(rhs)
    if rhs_norm == 0.0:
        return x, 0, 0.0, 0

    target = tol * rhs_norm
    iterations = 0
    restarts = 0
    residual = rhs_norm
    while True:
        counter = {"k": 0}

        def count(_):
            counter["k"] += 1

        budget = max_iters - iterations
        if budget <= 0:
            break
        x, _info = cg(
            operator,
            rhs,
            x0=x,
            rtol=tol,
            atol=0.0,
            maxiter=budget,
            M=preconditioner,
            callback=count,
        )
        iterations += counter["k"]
        if project is not None:
            x = project(x)
        residual = float(np.linalg.norm(rhs - operator.matvec(x)))
        if residual <= target or restarts >= settings.CG_MAX_RESTARTS or counter["k"] == 0:
            break
        restarts += 1
        logger.debug(f"CG restart {restarts}: true residual {residual:.3e} > target {target:.3e}")
    return x, iterations, residual, restarts


def _solve(g: Graph, m: MeasurementSet, rhs: np.ndarray, opts: SolveOptions, rank_deficient: bool) -> SolveReport:
    n = m.n
    size = n * m.node_count
    operator = penalized_operator(g, m, opts.mu, opts.mode)
    projector = (lambda v: _project(v, n)) if opts.mode == "centered" else None
    if projector is not None:
        rhs = projector(rhs)
    preconditioner = _jacobi_preconditioner(g, m, opts.mu) if opts.preconditioner == "jacobi" else None

    tol = opts.tolerance
    x, iterations, residual, restarts = _cg_solve(
        operator, rhs, tol, opts.iteration_cap(size), preconditioner, projector
    )
    rhs_norm = float(np.linalg.norm(rhs))
    converged = residual <= tol * rhs_norm
    if not converged:
        logger.warning(
            f"CG did not converge: residual {residual:.3e} after {iterations} iterations "
            f"(target {tol * rhs_norm:.3e})"
        )
    logger.debug(f"{opts.mode} solve nT={size}: {iterations} iterations, residual {residual:.3e}")
    return SolveReport(
        estimate=StackedSignal(n, m.node_count, x),
        iterations=iterations,
        final_residual=residual,
        converged=converged,
        rank_deficient=rank_deficient,
        restarts=restarts,
        rhs_norm=rhs_norm,
    )


def _rank_guard(m: MeasurementSet, opts: SolveOptions) -> bool:
    holds, relevant = rank_condition(m, opts.mode)
    if holds:
        return False
    if opts.mode == "plain":
        message = f"lambda_min(O_T^T O_T) = {relevant:.3e}: rank(O_T) < n, the penalized system is singular"
        error = SingularSystemError
    else:
        message = f"lambda_(n-1)(O_T^T O_T) = {relevant:.3e}: rank(O_T) < n - 1, the centered system is under-determined"
        error = UnderdeterminedSystemError
    if not opts.allow_rank_deficient:
        raise error(message)
    logger.warning(f"{message}; returning the minimum-norm solution")
    return True


def solve_penalized(g: Graph, m: MeasurementSet, y: np.ndarray, opts: SolveOptions) -> SolveReport:
    """
    Solve (mu M^T M + C^T C) x = C^T y by conjugate gradient.

    Raises:
        SingularSystemError: lambda_min(O_T^T O_T) is zero and rank deficiency is not allowed
    """
    _check_problem(g, m)
    if opts.mode != "plain":
        opts = replace(opts, mode="plain")
    rank_deficient = _rank_guard(m, opts)
    rhs = design_apply_transpose(m, y).data
    return _solve(g, m, rhs, opts, rank_deficient)


def solve_sync(g: Graph, m: MeasurementSet, y: np.ndarray, opts: SolveOptions) -> SolveReport:
    """
    Centered estimator x = (P (mu M^T M + C^T C) P)^+ C^T y.

    The CG iterate starts at zero and every operator application is
    projected, so the Krylov space stays inside range(P) and the result is
    the pseudoinverse solution.
    """
    _check_problem(g, m)
    if m.n < 2:
        raise InvalidSizeError("The centered estimator needs n >= 2")
    if opts.mode != "centered":
        opts = replace(opts, mode="centered")
    rank_deficient = _rank_guard(m, opts)
    rhs = design_apply_transpose(m, y).data
    return _solve(g, m, rhs, opts, rank_deficient)


def solve(g: Graph, m: MeasurementSet, y: np.ndarray, opts: SolveOptions) -> SolveReport:
    """Dispatch on opts.mode."""
    if opts.mode == "centered":
        return solve_sync(g, m, y, opts)
    return solve_penalized(g, m, y, opts)


def bias_variance_split(
    g: Graph,
    m: MeasurementSet,
    x_true: StackedSignal,
    eta: np.ndarray,
    opts: SolveOptions,
) -> Tuple[float, float]:
    """
    E1 = 2 mu^2 ||A^{-1} M^T M x||^2 and E2 = 2 ||A^{-1} C^T eta||^2.

    In centered mode A^{-1} is the pseudoinverse of P A P and x_true should be
    block-centered. The estimation error x_hat - x equals A^{-1}(C^T eta - mu M^T M x);
    the two partial solves are checked against an actual solve on y = C x + eta.
    """
    _check_problem(g, m)
    if opts.mode == "centered" and m.n < 2:
        raise InvalidSizeError("The centered estimator needs n >= 2")
    _rank_guard(m, opts)
    n = m.n
    size = n * m.node_count
    operator = penalized_operator(g, m, opts.mu, opts.mode)
    projector = (lambda v: _project(v, n)) if opts.mode == "centered" else None
    cap = opts.iteration_cap(size)

    smooth_rhs = g.apply_laplacian(x_true.data, n)
    noise_rhs = design_apply_transpose(m, eta).data
    if projector is not None:
        smooth_rhs = projector(smooth_rhs)
        noise_rhs = projector(noise_rhs)

    bias_part, *_ = _cg_solve(operator, smooth_rhs, opts.tolerance, cap, project=projector)
    noise_part, *_ = _cg_solve(operator, noise_rhs, opts.tolerance, cap, project=projector)
    E1 = 2.0 * opts.mu ** 2 * float(bias_part @ bias_part)
    E2 = 2.0 * float(noise_part @ noise_part)

    y = design_apply(m, x_true) + eta
    estimate = solve(g, m, y, replace(opts, allow_rank_deficient=True)).estimate.data
    target = projector(x_true.data) if projector is not None else x_true.data
    actual_error = estimate - target
    split_error = noise_part - opts.mu * bias_part
    gap = float(np.linalg.norm(actual_error - split_error))
    scale = max(float(np.linalg.norm(actual_error)), float(np.linalg.norm(target)), 1.0)
    if gap > SPLIT_CHECK_TOL * scale:
        logger.warning(f"Bias/variance split disagrees with the solved estimate: gap {gap:.3e}")
    return E1, E2
