"""
Levi-flat laboratory HTTP service entry point.

Starts the FastAPI application with Uvicorn. The command-line front end
is ``lfl`` (``python -m lfl``).
"""

import logging
from typing import NoReturn

import uvicorn

from lfl.config import settings

logging.basicConfig(
    level=getattr(logging, settings.LOG_LEVEL),
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
)
logger = logging.getLogger(__name__)


def main() -> NoReturn:
    logger.info(f"Starting {settings.PROJECT_NAME}")
    try:
        uvicorn.run(
            "lfl.main:app",
            host="0.0.0.0",
            port=8000,
            log_level=settings.LOG_LEVEL.lower(),
        )
    except Exception as e:
        logger.error(f"Failed to start application: {e}")
        raise


if __name__ == "__main__":
    main()
