"""
Pydantic schemas for bound evaluation and penalty selection endpoints.
"""
from pydantic import BaseModel, Field, model_validator
from typing import List, Literal, Optional
import math

from src.graph.schemas import GraphRequest


# ============================================================================
# Request Schemas
# ============================================================================

class BoundRequest(BaseModel):
    """
    Error-bound evaluation from explicit b-quantities.
    The Laplacian spectrum comes from `graph` or from `laplacian_eigenvalues`.
    """
    mu: float = Field(..., gt=0.0)
    b1: float = Field(..., gt=0.0, description="Lower bound on the Fiedler value")
    b2: float = Field(..., gt=0.0, description="Scaled Gram lower bound")
    b3: float = Field(..., gt=0.0, description="2 ||C|| sqrt(lambda_max / T)")
    lambda_min_CtC: float = Field(0.0, ge=0.0)
    graph: Optional[GraphRequest] = None
    laplacian_eigenvalues: Optional[List[float]] = Field(None, description="Descending Laplacian spectrum")
    n: int = Field(..., ge=1)
    sigma: float = Field(..., ge=0.0)
    design_norm: float = Field(..., ge=0.0)
    S_T: float = Field(..., ge=0.0)
    delta: float = Field(math.exp(-1.0), gt=0.0)
    variance_form: Literal["theorem", "lemma"] = "theorem"

    @model_validator(mode="after")
    def _spectrum_source(self) -> "BoundRequest":
        if (self.graph is None) == (self.laplacian_eigenvalues is None):
            raise ValueError("give exactly one of 'graph' or 'laplacian_eigenvalues'")
        return self


class MuStarRequest(BaseModel):
    """Inputs of one penalty rule; only the fields the rule uses are required."""
    rule: Literal["complete", "star", "rand_samp", "sync"]
    graph_kind: Literal["complete", "star"] = "complete"
    n: int = Field(..., ge=1)
    T: int = Field(..., ge=2)
    sigma: float = Field(..., ge=0.0)
    S_T: float = Field(..., ge=0.0)
    c: Optional[float] = Field(None, gt=0.0, description="c1 (c2 for the sync rule); default per graph kind")
    lmin: Optional[float] = None
    lmax: Optional[float] = None
    design_norm: Optional[float] = None
    theta: Optional[float] = None
    p_sum: Optional[float] = None
    p_max: Optional[float] = Field(None, description="Used to compute gamma when `gamma` is omitted")
    gamma: Optional[float] = None


# ============================================================================
# Response Schemas
# ============================================================================

class BoundReportResponse(BaseModel):
    lambda_bar_prime: float
    lambda_bar: float
    regime: Literal["small_mu", "large_mu"]
    bias_bound: float
    variance_bound: float
    total_bound: float
    delta: float
    variance_form: Literal["theorem", "lemma"]


class MuStarResponse(BaseModel):
    rule: str
    mu_star: float
    gamma: Optional[float] = None


class GammaResponse(BaseModel):
    n: int
    p_max: float
    T: int
    delta: float
    gamma: float
