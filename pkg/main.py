"""
Main FastAPI application entry point.
"""
from contextlib import asynccontextmanager
from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
import uvicorn

from src.core.config import settings, create_directories
from src.core.exceptions import GraphSmoothError
from src.core.logging_config import setup_logging, get_logger
from src.database.connection import init_db
from src.bounds.router import router as bounds_router
from src.estimator.router import router as estimator_router
from src.graph.router import router as graphs_router
from src.harness.router import router as experiments_router

# Initialize logging
setup_logging()
logger = get_logger("api")


@asynccontextmanager
async def lifespan(app: FastAPI):
    """Create directories and result-store tables on startup."""
    try:
        logger.info(f"Starting {settings.APP_NAME} {settings.VERSION}...")
        create_directories()
        init_db()
        logger.info(f"API docs at /api/docs, eigensolver: {settings.EIGEN_SOLVER}")
    except Exception as e:
        logger.error(f"Error during application startup: {str(e)}")
        raise

    yield

    logger.info(f"Shutting down {settings.APP_NAME}")


app = FastAPI(
    lifespan=lifespan,
    title=settings.APP_NAME,
    description="Graph-smooth signal recovery: Laplacian-penalized estimators, error bounds and Monte-Carlo experiments",
    version=settings.VERSION,
    docs_url="/api/docs",
    redoc_url="/api/redoc"
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=['*'],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


@app.exception_handler(GraphSmoothError)
async def graphsmooth_error_handler(request: Request, exc: GraphSmoothError):
    logger.warning(f"{request.method} {request.url.path} failed: {exc.detail}")
    return JSONResponse(status_code=exc.status_code, content={"detail": exc.detail})


@app.get("/")
async def root():
    """Root endpoint listing the API areas."""
    prefix = f"/api/{settings.API_VERSION}"
    return {
        "message": f"Welcome to the {settings.APP_NAME} API",
        "version": settings.VERSION,
        "docs": "/api/docs",
        "endpoints": {
            "graphs": f"{prefix}/graphs",
            "bounds": f"{prefix}/bounds",
            "estimator": f"{prefix}/estimator",
            "experiments": f"{prefix}/experiments",
        }
    }


@app.get("/health")
async def health_check():
    """Health check endpoint."""
    return {
        "status": "healthy",
        "app_name": settings.APP_NAME,
        "version": settings.VERSION,
        "eigen_solver": settings.EIGEN_SOLVER,
    }


app.include_router(graphs_router, prefix=f"/api/{settings.API_VERSION}")
app.include_router(bounds_router, prefix=f"/api/{settings.API_VERSION}")
app.include_router(estimator_router, prefix=f"/api/{settings.API_VERSION}")
app.include_router(experiments_router, prefix=f"/api/{settings.API_VERSION}")

if __name__ == "__main__":
    uvicorn.run(
        "main:app",
        host="0.0.0.0",
        port=8000,
        reload=settings.DEBUG
    )
