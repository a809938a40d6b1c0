"""
API routes for presets and synchronous experiment runs.
"""

from typing import List
from fastapi import APIRouter, Depends
from sqlalchemy.orm import Session

from src.core.exceptions import ConfigError
from src.core.logging_config import get_logger
from src.database.connection import get_db
from src.harness.presets import get_preset, list_presets
from src.harness.schemas import ExperimentResult, PresetInfo, RunRequest, TrialRow
from src.harness.service import run_experiment
from src.harness.storage import query_rows

logger = get_logger("api")

router = APIRouter(
    prefix="/experiments",
    tags=["Experiments"]
)


@router.get("/presets", response_model=List[PresetInfo])
def presets():
    """List the named experiment presets."""
    return list_presets()


@router.post("/run", response_model=ExperimentResult)
def run(request: RunRequest):
    """
    Run an experiment synchronously (meant for small configurations).

    - **config** or **preset**: what to run
    - **trials**: optional override of the trial count
    - **strict**: exclude non-converged trials from the aggregates
    - **fresh**: discard previously stored cells of the same experiment
    """
    if (request.config is None) == (request.preset is None):
        raise ConfigError("Give exactly one of 'config' or 'preset'")
    config = request.config or get_preset(request.preset)
    if request.trials is not None:
        config = config.model_copy(update={"trials": request.trials})
    logger.info(f"API run of experiment {config.name or config.key()}")
    return run_experiment(config, strict=request.strict, fresh=request.fresh)


@router.get("/{experiment_key}/rows", response_model=List[TrialRow])
def rows(experiment_key: str, db: Session = Depends(get_db)):
    """Stored trial rows of an experiment, ordered by (T, trial)."""
    return query_rows(db, experiment_key)
