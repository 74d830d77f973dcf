from typing import List, Optional

from fastapi import APIRouter
from pydantic import BaseModel

from lfl.exceptions import LFLError
from lfl.models.metric import FourierParam
from lfl.models.reports import ExponentReport, TraceRow
from lfl.models.run_config import RunConfig
from lfl.routes.checks import raise_http
from lfl.services.dfindex import exponent_of_metric
from lfl.services.optimizer import optimize_metric
from lfl.services.run_service import RunService

router = APIRouter()


class OptimizeResponse(BaseModel):
    report: ExponentReport
    stop_reason: str
    best_iteration: Optional[int]
    trace: List[TraceRow]


@router.post("/exponent", response_model=ExponentReport)
def compute_exponent(config: RunConfig):
    """Closed-form Diederich-Fornaess exponent of the configured metric."""
    try:
        service = RunService(config)
        return exponent_of_metric(service.model, service.resolve_metric())
    except LFLError as e:
        raise_http(e)


@router.post("/optimize", response_model=OptimizeResponse)
def optimize(config: RunConfig):
    """
    Two-phase simplex search over band-limited metrics.
    - Deterministic for a fixed seed (``seed`` or the metric's seed, else 0)
    - Returns the best exponent report and the iterate trace
    """
    options = config.optimizer
    param = FourierParam(cutoff=options.cutoff, smoothness=options.smoothness, amplitude=options.amplitude)
    seed = config.effective_seed if config.effective_seed is not None else 0
    try:
        model = config.model.build()
        _, report, trace = optimize_metric(model, param, options, seed)
    except LFLError as e:
        raise_http(e)
    return OptimizeResponse(
        report=report, stop_reason=trace.stop_reason, best_iteration=trace.best_iteration, trace=trace.rows
    )
