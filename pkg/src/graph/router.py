"""
API routes for graph spectra and quadratic variation.
"""

from fastapi import APIRouter

from src.core.logging_config import get_logger
from src.graph.core import laplacian_spectrum, quadratic_variation
from src.graph.schemas import (
    GraphRequest,
    QuadraticVariationRequest,
    QuadraticVariationResponse,
    SpectrumResponse,
)

logger = get_logger("api")

router = APIRouter(
    prefix="/graphs",
    tags=["Graphs"]
)


@router.post("/spectrum", response_model=SpectrumResponse)
def graph_spectrum(request: GraphRequest):
    """
    Laplacian spectrum of a graph family or custom edge list.

    - **kind**: complete, star or path (or give **edges** instead)
    - **T**: number of vertices
    """
    g = request.to_graph()
    spectrum = laplacian_spectrum(g)
    return SpectrumResponse(
        T=g.vertex_count,
        edge_count=g.edge_count,
        component_count=g.component_count(),
        eigenvalues=spectrum.eigenvalues.tolist(),
        fiedler=spectrum.fiedler,
        source=spectrum.source,
    )


@router.post("/quadratic-variation", response_model=QuadraticVariationResponse)
def graph_quadratic_variation(request: QuadraticVariationRequest):
    """Sum over edges of the squared distance between endpoint signals."""
    g = request.graph.to_graph()
    return QuadraticVariationResponse(quadratic_variation=quadratic_variation(g, request.to_signal()))
