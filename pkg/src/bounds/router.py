"""
API routes for error bounds and penalty rules.
"""

import numpy as np
from fastapi import APIRouter, Query

from src.bounds.lemma import BoundInputs, error_bound
from src.bounds.mu_rules import (
    gamma_nT,
    mu_star_complete,
    mu_star_rand_samp,
    mu_star_star_graph,
    mu_star_sync,
)
from src.bounds.schemas import (
    BoundReportResponse,
    BoundRequest,
    GammaResponse,
    MuStarRequest,
    MuStarResponse,
)
from src.core.config import settings
from src.core.exceptions import InvalidParameterError
from src.core.logging_config import get_logger
from src.graph.core import LaplacianSpectrum, laplacian_spectrum

logger = get_logger("api")

router = APIRouter(
    prefix="/bounds",
    tags=["Bounds"]
)


@router.post("/report", response_model=BoundReportResponse)
def bound_report(request: BoundRequest):
    """
    Evaluate lambda_bar'(mu), lambda_bar(mu) and the bias / variance bounds.
    """
    inputs = BoundInputs(
        mu=request.mu, b1=request.b1, b2=request.b2, b3=request.b3, lambda_min_CtC=request.lambda_min_CtC
    )
    if request.graph is not None:
        spectrum = laplacian_spectrum(request.graph.to_graph())
    else:
        values = np.sort(np.asarray(request.laplacian_eigenvalues, dtype=float))[::-1]
        spectrum = LaplacianSpectrum(eigenvalues=values, source="dense_solver")
    report = error_bound(
        inputs, spectrum, request.n, request.sigma, request.design_norm, request.S_T, request.delta,
        variance_form=request.variance_form,
    )
    return BoundReportResponse(**report.as_dict())


def _require(request: MuStarRequest, *names: str):
    missing = [name for name in names if getattr(request, name) is None]
    if missing:
        raise InvalidParameterError(f"Rule {request.rule!r} needs {', '.join(missing)}")


@router.post("/mu-star", response_model=MuStarResponse)
def mu_star(request: MuStarRequest):
    """
    Penalty rule mu* for one of:

    - **complete** / **star**: general measurements with Gram bounds lmin, lmax and ||C||
    - **rand_samp**: sparse random measurements with probability theta
    - **sync**: Erdos-Renyi layer synchronization with p_sum and gamma (or p_max)
    """
    gamma = None
    if request.rule in ("complete", "star"):
        _require(request, "lmin", "lmax", "design_norm")
        rule = mu_star_complete if request.rule == "complete" else mu_star_star_graph
        value = rule(request.lmin, request.lmax, request.n, request.sigma, request.design_norm,
                     request.S_T, request.T, request.c)
    elif request.rule == "rand_samp":
        _require(request, "theta")
        value = mu_star_rand_samp(request.theta, request.T, request.n, request.sigma, request.S_T,
                                  c1=request.c, graph_kind=request.graph_kind)
    else:
        _require(request, "p_sum")
        gamma = request.gamma
        if gamma is None:
            _require(request, "p_max")
            gamma = gamma_nT(request.n, request.p_max, request.T)
        value = mu_star_sync(request.p_sum, gamma, request.n, request.sigma, request.S_T, request.T,
                             c2=request.c, graph_kind=request.graph_kind)
    return MuStarResponse(rule=request.rule, mu_star=value, gamma=gamma)


@router.get("/gamma", response_model=GammaResponse)
def gamma(
    n: int = Query(..., ge=1),
    p_max: float = Query(..., ge=0.0, le=1.0),
    T: int = Query(..., ge=1),
    delta: float = Query(settings.GAMMA_DELTA, gt=0.0, lt=1.0),
):
    """High-probability bound gamma_{n,T} on ||C||_2 for Erdos-Renyi layers."""
    return GammaResponse(n=n, p_max=p_max, T=T, delta=delta, gamma=gamma_nT(n, p_max, T, delta))
