"""
API route for the penalized estimator.
"""

import numpy as np
from fastapi import APIRouter

from src.core.exceptions import DimensionMismatchError
from src.core.logging_config import get_logger
from src.estimator.schemas import SolveRequest, SolveResponse
from src.estimator.solver import SolveOptions, solve
from src.measurement.design import MeasurementSet

logger = get_logger("api")

router = APIRouter(
    prefix="/estimator",
    tags=["Estimator"]
)


def _measurements(request: SolveRequest) -> MeasurementSet:
    blocks = []
    for t, rows in enumerate(request.blocks):
        if not rows:
            blocks.append(np.zeros((0, request.n)))
            continue
        if any(len(row) != request.n for row in rows):
            raise DimensionMismatchError(f"Block {t + 1} does not have n = {request.n} columns")
        blocks.append(np.asarray(rows, dtype=float))
    return MeasurementSet.from_dense_blocks(blocks)


@router.post("/solve", response_model=SolveResponse)
def solve_problem(request: SolveRequest):
    """
    Solve the plain or centered penalized normal equations by conjugate gradient.

    - **mode**: plain, or centered for pairwise-difference (synchronization) data
    - **allow_rank_deficient**: return the minimum-norm solution instead of a 422
    """
    g = request.graph.to_graph()
    m = _measurements(request)
    opts = SolveOptions(
        mu=request.mu,
        rel_tol=request.rel_tol,
        max_iters=request.max_iters,
        mode=request.mode,
        allow_rank_deficient=request.allow_rank_deficient,
    )
    report = solve(g, m, np.asarray(request.y, dtype=float), opts)
    logger.info(f"Solved {request.mode} problem with nT={m.n * m.node_count} in {report.iterations} iterations")
    return SolveResponse(
        estimate=report.estimate.blocks().tolist(),
        iterations=report.iterations,
        final_residual=report.final_residual,
        converged=report.converged,
        rank_deficient=report.rank_deficient,
    )
