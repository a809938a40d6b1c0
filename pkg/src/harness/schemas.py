"""
Pydantic schemas for experiments: configuration, per-trial rows, per-T
aggregates and the full result archive.
"""

from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator
from typing import Any, Dict, List, Literal, Optional
import hashlib
import json
import math
import re

from src.core.config import DEFAULT_C1, settings
from src.core.exceptions import ConfigError

# Supported smoothness rules: "c", "c*sqrt(T)", "sqrt(T)", "c*T^a", "T^a"
_NUMBER = r"[+]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?"
_CONSTANT = re.compile(rf"^(?P<c>{_NUMBER})$")
_EXPONENT = r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)"
_SQRT = re.compile(rf"^(?:(?P<c>{_NUMBER})\s*\*\s*)?sqrt\(\s*T\s*\)$")
_POWER = re.compile(rf"^(?:(?P<c>{_NUMBER})\s*\*\s*)?T\s*(?:\^|\*\*)\s*(?P<a>{_EXPONENT})$")


def evaluate_smoothness_rule(rule: str, T: int) -> float:
    """Evaluate an S_T rule at T."""
    text = rule.strip()
    match = _CONSTANT.match(text)
    if match:
        return float(match.group("c"))
    match = _SQRT.match(text)
    if match:
        return float(match.group("c") or 1.0) * math.sqrt(T)
    match = _POWER.match(text)
    if match:
        return float(match.group("c") or 1.0) * float(T) ** float(match.group("a"))
    raise ValueError(f"Unsupported S_T rule {rule!r}; use 'c', 'c*sqrt(T)' or 'c*T^a'")


# ============================================================================
# Configuration
# ============================================================================

class ExperimentConfig(BaseModel):
    """One Monte-Carlo experiment over a grid of graph sizes T."""
    name: Optional[str] = Field(None, description="Preset or user label (not part of the experiment key)")
    graph_kind: Literal["complete", "star", "path"] = Field(..., description="Graph on the T nodes")
    measurement_model: Literal["sparse_rows", "er_layers"] = Field(..., description="Measurement model")
    theta: Optional[float] = Field(None, gt=0.0, le=1.0, description="Sampling probability (sparse_rows)")
    p: Optional[float] = Field(None, gt=0.0, le=1.0, description="Edge probability of every layer (er_layers)")
    n: int = Field(..., ge=1, description="Signal dimension per node")
    sigma: float = Field(..., ge=0.0, description="Noise standard deviation")
    S_T_rule: str = Field(..., description="Smoothness budget as a function of T")
    T_grid: List[int] = Field(..., min_length=1, description="Strictly increasing node counts")
    trials: int = Field(default_factory=lambda: settings.DEFAULT_TRIALS, ge=1)
    base_seed: int = Field(0, ge=0, lt=2 ** 64)
    mu_rule: Literal["corollary_auto", "fixed"] = "corollary_auto"
    mu: Optional[float] = Field(None, gt=0.0, description="Penalty for mu_rule = fixed")
    c1: Optional[float] = Field(None, gt=0.0, description="Constant of the mu* rule (c2 for er_layers)")
    delta: float = Field(0.05, gt=0.0, le=math.exp(-1.0), description="Confidence parameter of the envelopes")

    @field_validator("T_grid")
    @classmethod
    def _increasing_grid(cls, grid: List[int]) -> List[int]:
        if any(T < 2 for T in grid):
            raise ValueError("every T in T_grid must be >= 2")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("T_grid must be strictly increasing")
        return grid

    @field_validator("S_T_rule")
    @classmethod
    def _known_rule(cls, rule: str) -> str:
        if evaluate_smoothness_rule(rule, 2) < 0:
            raise ValueError("S_T rule must be nonnegative")
        return rule.strip()

    @model_validator(mode="after")
    def _consistent(self) -> "ExperimentConfig":
        if self.measurement_model == "sparse_rows" and self.theta is None:
            raise ValueError("sparse_rows needs theta")
        if self.measurement_model == "er_layers":
            if self.p is None:
                raise ValueError("er_layers needs p")
            if self.n < 2:
                raise ValueError("er_layers needs n >= 2")
        if self.mu_rule == "fixed" and self.mu is None:
            raise ValueError("mu_rule = fixed needs mu")
        if self.mu_rule == "corollary_auto" and self.graph_kind == "path":
            raise ValueError("corollary_auto has no mu* rule for the path graph; use a fixed mu")
        return self

    def smoothness(self, T: int) -> float:
        return evaluate_smoothness_rule(self.S_T_rule, T)

    def rule_constant(self) -> float:
        if self.c1 is not None:
            return self.c1
        if self.measurement_model == "er_layers":
            return settings.C2_SYNC
        return DEFAULT_C1[self.graph_kind]

    def key(self) -> str:
        """md5 of the canonical JSON of every field except the label."""
        payload = json.dumps(self.model_dump(exclude={"name"}), sort_keys=True, separators=(",", ":"))
        return hashlib.md5(payload.encode("utf-8")).hexdigest()


def parse_config(data: Dict[str, Any]) -> ExperimentConfig:
    """Validate a mapping into an ExperimentConfig, raising ConfigError on failure."""
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as exc:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}" for err in exc.errors()
        )
        raise ConfigError(f"Invalid experiment config: {problems}")


# ============================================================================
# Results
# ============================================================================

class TrialRow(BaseModel):
    """Outcome of one (T, trial) cell."""
    T: int
    trial: int
    seed: int
    mse: Optional[float] = Field(..., ge=0.0, description="None when the trial raised")
    realized_S_T: Optional[float]
    mu_used: Optional[float]
    solver_iterations: int
    converged: bool
    rank_deficient: bool = False
    error: Optional[str] = Field(None, description="Failure message of a trial that raised")


class TAggregate(BaseModel):
    """MSE statistics over the trials at one T."""
    T: int
    mean_mse: Optional[float]
    median_mse: Optional[float]
    std_mse: Optional[float]
    trials: int
    flagged: int = Field(0, description="Non-converged or failed trials at this T")
    rate_envelope: Optional[float] = Field(None, description="Corollary squared-error envelope divided by T")


class ExperimentResult(BaseModel):
    config: ExperimentConfig
    experiment_key: str
    version: str
    strict: bool = False
    rows: List[TrialRow]
    aggregates: List[TAggregate]


# ============================================================================
# API bodies
# ============================================================================

class PresetInfo(BaseModel):
    name: str
    description: str
    config: ExperimentConfig


class RunRequest(BaseModel):
    config: Optional[ExperimentConfig] = None
    preset: Optional[str] = None
    strict: bool = False
    fresh: bool = False
    trials: Optional[int] = Field(None, ge=1, description="Override the trial count")
