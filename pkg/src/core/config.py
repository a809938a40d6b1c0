"""
Configuration settings for graphsmooth.
Loads environment variables and provides centralized config.
"""

from pydantic_settings import BaseSettings
from pydantic import ConfigDict
from typing import Optional
import os
from pathlib import Path

try:
    from dotenv import load_dotenv
    env_file = Path(__file__).parent.parent.parent / ".env"
    if env_file.exists():
        load_dotenv(env_file, override=True)
except ImportError:
    pass


class Settings(BaseSettings):
    """Application configuration settings."""

    #Application
    APP_NAME: str = "GraphSmooth"
    VERSION: str = "0.1.0"
    API_VERSION: str = "v1"
    DEBUG: bool = False

    #Logging
    LOG_LEVEL: str = "INFO"
    LOGS_DIR: str = "logs"

    #Result store
    DATABASE_URL: str = "sqlite:///data/graphsmooth.db"
    RESULTS_DIR: str = "data/results"

    # Worker pool cap for Monte-Carlo runs (unset -> CPU count)
    GRAPHSMOOTH_THREADS: Optional[int] = None

    #Dense eigensolver
    EIGEN_SOLVER: str = "lapack"  # "lapack" or "jacobi"
    JACOBI_REL_TOL: float = 1e-12
    JACOBI_MAX_SWEEPS: int = 100

    # Per-block spectral norm (power iteration on C_t^T C_t)
    POWER_ITER_REL_TOL: float = 1e-10
    POWER_ITER_MAX: int = 10000

    # Relative eigenvalue threshold for rank checks
    RANK_REL_TOL: float = 1e-10

    #Conjugate gradient
    CG_REL_TOL: float = 1e-10
    CG_MAX_ITERS_FACTOR: int = 10
    CG_MAX_RESTARTS: int = 3
    DENSE_ORACLE_MAX_SIZE: int = 1024

    #Experiments
    DEFAULT_TRIALS: int = 50
    GAMMA_DELTA: float = 0.05
    C1_COMPLETE: float = 2.0
    C1_STAR: float = 3.0
    C2_SYNC: float = 2.0

    model_config = ConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=True,
        extra="ignore"
    )

    def worker_count(self) -> int:
        """Size of the trial worker pool."""
        if self.GRAPHSMOOTH_THREADS and self.GRAPHSMOOTH_THREADS > 0:
            return self.GRAPHSMOOTH_THREADS
        return os.cpu_count() or 1


settings = Settings()


def create_directories():
    """Create required directories if they don't exist."""
    directories = [
        settings.RESULTS_DIR,
        settings.LOGS_DIR,
    ]
    if settings.DATABASE_URL.startswith("sqlite:///"):
        db_path = Path(settings.DATABASE_URL[len("sqlite:///"):])
        if str(db_path) and str(db_path) != ":memory:":
            directories.append(str(db_path.parent))
    for directory in directories:
        if directory:
            os.makedirs(directory, exist_ok=True)


# Corollary constants used by the automatic mu rule
DEFAULT_C1 = {
    "complete": settings.C1_COMPLETE,
    "star": settings.C1_STAR,
}
