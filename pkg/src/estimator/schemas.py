"""
Pydantic schemas for the solve endpoint.
"""
from pydantic import BaseModel, Field
from typing import List, Literal, Optional

from src.graph.schemas import GraphRequest


class SolveRequest(BaseModel):
    """
    A penalized least-squares problem with dense per-node measurement blocks.
    `blocks[t]` is the m_t x n matrix C_t (an empty list for m_t = 0).
    """
    graph: GraphRequest
    n: int = Field(..., ge=1)
    blocks: List[List[List[float]]]
    y: List[float] = Field(..., description="Stacked observations, node order")
    mu: float = Field(..., gt=0.0)
    mode: Literal["plain", "centered"] = "plain"
    rel_tol: Optional[float] = Field(None, gt=0.0, lt=1.0)
    max_iters: Optional[int] = Field(None, ge=1)
    allow_rank_deficient: bool = False


class SolveResponse(BaseModel):
    estimate: List[List[float]] = Field(..., description="T rows of n estimated values")
    iterations: int
    final_residual: float
    converged: bool
    rank_deficient: bool
