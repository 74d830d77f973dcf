from fastapi import APIRouter, HTTPException, Path

from lfl.exceptions import FormConstructionError, LFLError, NumericalError
from lfl.models.reports import CheckReport
from lfl.models.run_config import RunConfig
from lfl.services.run_service import CHECKS, RunService

router = APIRouter()


def raise_http(error: LFLError) -> None:
    """Numerical failures are server errors; everything else is a bad request."""
    if isinstance(error, (NumericalError, FormConstructionError)):
        raise HTTPException(status_code=500, detail=f"{type(error).__name__}: {error}") from error
    raise HTTPException(status_code=400, detail=f"{type(error).__name__}: {error}") from error


@router.post("/{check}", response_model=CheckReport, response_model_by_alias=True)
def run_check(
    config: RunConfig,
    check: str = Path(..., description="identity | exactness | integral | remark"),
):
    """
    Run one verification check on the configured model and metric.
    - Nothing is written to disk
    - The report's ``pass`` compares the residual with the configured tolerance
    """
    if check not in CHECKS:
        raise HTTPException(status_code=404, detail=f"Unknown check {check!r}; expected one of {', '.join(CHECKS)}")
    try:
        service = RunService(config)
        return service.check(check, service.resolve_metric())
    except LFLError as e:
        raise_http(e)
