"""
Pydantic schemas for graph endpoints.
Vertex indices in request bodies are 1-based, as in the edge-list format.
"""
from pydantic import BaseModel, Field, model_validator
from typing import List, Literal, Optional

from src.core.exceptions import InvalidParameterError
from src.graph.core import Graph, StackedSignal, build_graph


class GraphRequest(BaseModel):
    """A named graph family or an explicit edge list."""
    kind: Optional[Literal["complete", "star", "path"]] = Field(None, description="Graph family")
    T: int = Field(..., ge=2, description="Number of vertices")
    edges: Optional[List[List[int]]] = Field(None, description="1-based vertex pairs (custom graph)")

    @model_validator(mode="after")
    def _kind_or_edges(self) -> "GraphRequest":
        if (self.kind is None) == (self.edges is None):
            raise ValueError("give exactly one of 'kind' or 'edges'")
        return self

    def to_graph(self) -> Graph:
        if self.kind is not None:
            return build_graph(self.kind, self.T)
        pairs = []
        for pair in self.edges:
            if len(pair) != 2:
                raise InvalidParameterError(f"edge {pair} must have two endpoints")
            pairs.append((pair[0] - 1, pair[1] - 1))
        return Graph.from_pairs(self.T, pairs)


class SpectrumResponse(BaseModel):
    T: int
    edge_count: int
    component_count: int
    eigenvalues: List[float] = Field(..., description="Laplacian eigenvalues, descending")
    fiedler: float
    source: str


class QuadraticVariationRequest(BaseModel):
    graph: GraphRequest
    signal: List[List[float]] = Field(..., description="T rows of n node-signal values")

    def to_signal(self) -> StackedSignal:
        return StackedSignal.from_blocks(self.signal)


class QuadraticVariationResponse(BaseModel):
    quadratic_variation: float
