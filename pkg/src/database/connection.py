"""
Database connection and session management for the experiment result store.
"""

from sqlalchemy import create_engine
from sqlalchemy.orm import declarative_base, sessionmaker, Session
from sqlalchemy.exc import SQLAlchemyError
from sqlalchemy.pool import StaticPool
from collections.abc import Iterator
from src.core.config import settings
from src.core.logging_config import get_logger

logger = get_logger("database")


def _engine_options(url: str) -> dict:
    """SQLite needs cross-thread access; in-memory databases need a single shared connection."""
    if not url.startswith("sqlite"):
        return {"pool_pre_ping": True}
    options = {"connect_args": {"check_same_thread": False}}
    if url in ("sqlite://", "sqlite:///:memory:"):
        options["poolclass"] = StaticPool
    return options


engine = create_engine(
    settings.DATABASE_URL,
    echo=settings.DEBUG,
    **_engine_options(settings.DATABASE_URL)
)

SessionLocal = sessionmaker(
    autocommit=False,
    autoflush=False,
    bind=engine
)

Base = declarative_base()


def get_db() -> Iterator[Session]:
    """Dependency that provides a database session."""
    db = SessionLocal()
    try:
        yield db
    except SQLAlchemyError as e:
        logger.error(f"Database session error: {str(e)}")
        db.rollback()
        raise
    finally:
        db.close()


def init_db():
    """Initialize the database by creating all tables."""
    # Models must be imported so their tables are registered on Base
    from src.harness import models  # noqa: F401

    try:
        logger.info("Initializing result store tables...")
        Base.metadata.create_all(bind=engine)
        logger.info("Result store tables initialized successfully")
    except SQLAlchemyError as e:
        logger.error(f"Error initializing database: {str(e)}")
        raise
