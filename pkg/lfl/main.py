import logging
from contextlib import asynccontextmanager

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from lfl import __version__
from lfl.config import settings
from lfl.routes import checks, exponent

logger = logging.getLogger(__name__)


@asynccontextmanager
async def lifespan(app: FastAPI):
    """
    Application lifespan manager.

    Logs the effective numerical settings at startup.
    """
    logger.info(f"Starting {settings.PROJECT_NAME} {settings.PROJECT_VERSION}")
    logger.info(
        f"Workers: {settings.worker_count}, positivity rtol: {settings.POSITIVITY_RTOL}, "
        f"residual floor: {settings.RESIDUAL_FLOOR}"
    )
    yield
    logger.info(f"Shutting down {settings.PROJECT_NAME}")


app = FastAPI(
    title="Levi-flat laboratory",
    description="""
    Numerical laboratory for the Diederich-Fornaess index of Levi-flat CR manifolds.

    This API provides endpoints for:
    - Verification checks of the structure identities, exactness and Stokes integrals
    - Closed-form exponents of a configured metric
    - Simplex search for the largest exponent over band-limited metrics
    """,
    version=__version__,
    lifespan=lifespan,
    docs_url="/docs",
    redoc_url="/redoc",
)


app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["GET", "POST"],
    allow_headers=["*"],
)

app.include_router(checks.router, prefix="/api/v1/checks", tags=["Verification"])
app.include_router(exponent.router, prefix="/api/v1", tags=["Exponent"])


@app.get("/", tags=["Health Check"])
async def root():
    """
    Root endpoint providing basic API information and health status.

    Returns:
        dict: API status and basic information
    """
    return {
        "message": settings.PROJECT_NAME,
        "status": "operational",
        "version": __version__,
        "docs": "/docs",
    }


@app.get("/health", tags=["Health Check"])
async def health_check():
    return {"status": "healthy", "service": "lfl"}
