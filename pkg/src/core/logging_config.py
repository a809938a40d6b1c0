"""
Simple logging configuration for graphsmooth.
Provides both file and console logging with proper formatting.
"""

import logging
from datetime import datetime
from pathlib import Path
from typing import Optional
from src.core.config import settings

# Log format
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"

AREA_LOGGERS = [
    "graph",
    "measurement",
    "bounds",
    "estimator",
    "signals",
    "harness",
    "database",
    "api",
    "cli",
]


def setup_logging(level: Optional[str] = None, rich_console: bool = False):
    """
    Configure logging for the application.

    Args:
        level: Log level name, defaults to settings.LOG_LEVEL
        rich_console: Render console records with rich (used by the CLI)
    """
    level_name = (level or settings.LOG_LEVEL).upper()

    logs_dir = Path(settings.LOGS_DIR)
    logs_dir.mkdir(parents=True, exist_ok=True)
    log_file = logs_dir / f"graphsmooth_{datetime.now().strftime('%Y%m%d')}.log"

    if rich_console:
        from rich.logging import RichHandler
        console_handler = RichHandler(rich_tracebacks=True, show_path=False)
    else:
        console_handler = logging.StreamHandler()

    logging.basicConfig(
        level=level_name,
        format=LOG_FORMAT,
        datefmt=DATE_FORMAT,
        handlers=[
            # File handler - logs everything to file
            logging.FileHandler(log_file, encoding="utf-8"),
            console_handler,
        ],
        force=True,
    )

    for name in AREA_LOGGERS:
        logging.getLogger(name).setLevel(level_name)

    return logging.getLogger(__name__)


def get_logger(name: str) -> logging.Logger:
    """Get a logger instance by name."""
    return logging.getLogger(name)
