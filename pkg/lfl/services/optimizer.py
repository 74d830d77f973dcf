"""
Metric Optimizer Service Module

Estimates the Diederich-Fornaess index of a model from below by searching
band-limited Fourier metrics with a derivative-free simplex method:

- phase 1 maximizes the smallest eigenvalue of Theta until the metric is
  feasible (Theta > 0 everywhere) or the search stalls;
- phase 2 maximizes the smoothed exponent 1 / (1 + T logsumexp(s / T)),
  annealing the temperature T.

The best exactly-evaluated iterate is returned with the full trace.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy.special import logsumexp

from lfl.models.foliation import FoliatedModel
from lfl.models.metric import FourierParam
from lfl.models.reports import ExponentReport, OptimizationTrace, TraceRow
from lfl.models.run_config import OptimizerConfig
from lfl.services.dfindex import exponent_bound, exponent_of_metric, positivity_threshold, schur_quantity
from lfl.services.forms import MetricField, alpha_vector, theta_matrix
from lfl.services.metric_generator import (
    check_bandwidth,
    evaluate_fourier,
    half_spectrum,
    parameters_to_coefficients,
    preset_metric,
)

logger = logging.getLogger(__name__)


class NelderMead:
    """
    Nelder-Mead simplex minimizer driven one iteration at a time.

    Standard coefficients: reflection 1, expansion 2, contraction 1/2,
    shrink 1/2. The initial simplex steps along each coordinate with the
    given signs.
    """

    def __init__(
        self,
        func: Callable[[np.ndarray], float],
        x_start: np.ndarray,
        step: float,
        signs: np.ndarray,
        alpha: float = 1.0,
        gamma: float = 2.0,
        beta: float = 0.5,
        delta: float = 0.5,
    ):
        self.func = func
        self.alpha, self.gamma, self.beta, self.delta = alpha, gamma, beta, delta
        x_start = np.asarray(x_start, dtype=np.float64)
        self.simplex: List[Tuple[np.ndarray, float]] = [(x_start, func(x_start))]
        for i in range(x_start.shape[0]):
            x = x_start.copy()
            x[i] += step * signs[i]
            self.simplex.append((x, func(x)))
        self._order()

    def _order(self) -> None:
        # Stable sort keeps the older vertex first on ties.
        self.simplex.sort(key=lambda vertex: vertex[1])

    @property
    def best(self) -> Tuple[np.ndarray, float]:
        return self.simplex[0]

    def size(self) -> float:
        """Largest distance of a vertex from the best vertex."""
        x0 = self.simplex[0][0]
        return float(max(np.linalg.norm(x - x0) for x, _ in self.simplex[1:]))

    def iterate(self) -> None:
        worst_x, worst_f = self.simplex[-1]
        centroid = np.mean([x for x, _ in self.simplex[:-1]], axis=0)

        xr = centroid + self.alpha * (centroid - worst_x)
        fr = self.func(xr)
        if self.simplex[0][1] <= fr < self.simplex[-2][1]:
            self.simplex[-1] = (xr, fr)
        elif fr < self.simplex[0][1]:
            xe = centroid + self.gamma * (centroid - worst_x)
            fe = self.func(xe)
            self.simplex[-1] = (xe, fe) if fe < fr else (xr, fr)
        else:
            xc = centroid + self.beta * (worst_x - centroid)
            fc = self.func(xc)
            if fc < worst_f:
                self.simplex[-1] = (xc, fc)
            else:
                x1 = self.simplex[0][0]
                shrunk = [self.simplex[0]]
                for x, _ in self.simplex[1:]:
                    xs = x1 + self.delta * (x - x1)
                    shrunk.append((xs, self.func(xs)))
                self.simplex = shrunk
        self._order()


@dataclass
class _Evaluation:
    min_eig: float
    threshold: float
    s_max: Optional[float]
    lse: Dict[float, float]

    @property
    def feasible(self) -> bool:
        return self.min_eig > self.threshold

    @property
    def eta(self) -> float:
        return 1.0 / (1.0 + self.s_max) if self.feasible else 0.0


class MetricSearch:
    """Objective bookkeeping shared by both phases."""

    def __init__(self, model: FoliatedModel, param: FourierParam, base: MetricField, temperatures: List[float]):
        self.model = model
        self.param = param
        self.base = base
        self.temperatures = temperatures
        self.cache: Dict[bytes, _Evaluation] = {}
        self.best_eta = -1.0
        self.best_x: Optional[np.ndarray] = None
        self.best_min_eig = -np.inf
        self.best_min_eig_x: Optional[np.ndarray] = None
        self.row_keys: List[bytes] = []

    def metric(self, x: np.ndarray) -> MetricField:
        param = self.param.model_copy(update={"coefficients": parameters_to_coefficients(x)})
        return MetricField(self.base.u + evaluate_fourier(self.model, param))

    def evaluate(self, x: np.ndarray) -> _Evaluation:
        key = np.asarray(x, dtype=np.float64).tobytes()
        if key in self.cache:
            return self.cache[key]
        m = self.metric(x)
        theta = theta_matrix(self.model, m)
        min_eig = float(np.min(theta.min_eigenvalue()))
        threshold = positivity_threshold(theta)
        s_max, lse = None, {}
        if min_eig > threshold:
            s = np.maximum(schur_quantity(theta, alpha_vector(self.model, m)), 0.0).ravel()
            s_max = float(np.max(s))
            lse = {T: float(T * logsumexp(s / T)) for T in self.temperatures}
        result = _Evaluation(min_eig, threshold, s_max, lse)
        self.cache[key] = result

        if min_eig > self.best_min_eig:
            self.best_min_eig, self.best_min_eig_x = min_eig, np.array(x, dtype=np.float64)
        if result.feasible and result.eta > self.best_eta:
            self.best_eta, self.best_x = result.eta, np.array(x, dtype=np.float64)
        return result

    def phase1_objective(self, x: np.ndarray) -> float:
        return -self.evaluate(x).min_eig

    def phase2_objective(self, temperature: float) -> Callable[[np.ndarray], float]:
        def objective(x: np.ndarray) -> float:
            ev = self.evaluate(x)
            if not ev.feasible:
                return 1.0 + (ev.threshold - ev.min_eig)
            return -1.0 / (1.0 + ev.lse[temperature])

        return objective


def _run_phase(
    search: MetricSearch,
    simplex: NelderMead,
    phase: int,
    max_iterations: int,
    config: OptimizerConfig,
    trace: OptimizationTrace,
    temperature: Optional[float] = None,
    stop_when_feasible: bool = False,
) -> str:
    stalled = 0
    previous = simplex.best[1]
    for _ in range(max_iterations):
        simplex.iterate()
        x, f = simplex.best
        ev = search.evaluate(x)
        search.row_keys.append(np.asarray(x, dtype=np.float64).tobytes())
        trace.rows.append(
            TraceRow(
                iteration=len(trace.rows),
                phase=phase,
                temperature=temperature,
                min_eig=ev.min_eig,
                s_max=ev.s_max,
                eta=ev.eta,
                simplex_size=simplex.size(),
                objective=f,
            )
        )
        logger.debug(f"phase {phase} it {len(trace.rows)}: objective {f:.6e}, min eig {ev.min_eig:.3e}")
        if stop_when_feasible and ev.feasible:
            return "feasible"
        if f < previous - config.improvement_tol:
            stalled, previous = 0, f
        else:
            stalled += 1
        if stalled >= config.stall_iterations:
            return "stalled"
    return "max_iterations"


def optimize_metric(
    model: FoliatedModel,
    param: FourierParam,
    config: OptimizerConfig,
    seed: int,
    base: Optional[MetricField] = None,
) -> Tuple[MetricField, ExponentReport, OptimizationTrace]:
    """
    Search band-limited metrics for the largest Diederich-Fornaess exponent.

    Args:
        model: the foliated model
        param: Fourier family; its coefficients (if any) are the starting point
        config: optimizer settings
        seed: fixes the initial simplex orientation; runs are deterministic
        base: metric the Fourier perturbation is added to (default u = 0, or
            the preset named in the config)

    Returns:
        (best metric, its exponent report, the iterate trace)

    Raises:
        ConfigError: if the cutoff exceeds size/4 on a periodic model
    """
    check_bandwidth(model, param.cutoff)
    if base is None:
        base = (
            preset_metric(model, config.base_preset)
            if config.base_preset is not None
            else MetricField(np.zeros(model.shape))
        )
    count = len(half_spectrum(model.dim, param.cutoff))
    x0 = np.zeros(2 * count)
    if param.coefficients:
        x0 = np.asarray(param.coefficients, dtype=np.float64).ravel()

    rng = np.random.default_rng(seed)
    signs = rng.choice(np.array([-1.0, 1.0]), size=x0.shape[0])
    search = MetricSearch(model, param, base, config.temperatures)
    trace = OptimizationTrace(seed=seed, parameters=int(x0.shape[0]))
    logger.info(f"Optimizing {count} Fourier modes on {model.describe()} (seed {seed})")

    start = search.evaluate(x0)
    stop_reason = "feasible start"
    if not start.feasible:
        simplex = NelderMead(search.phase1_objective, x0, config.step, signs)
        stop_reason = _run_phase(
            search, simplex, 1, config.max_iterations_phase1, config, trace, stop_when_feasible=True
        )
        logger.info(f"Phase 1 finished: {stop_reason}, best min eigenvalue {search.best_min_eig:.3e}")

    if search.best_x is not None:
        x = search.best_x
        for temperature in config.temperatures:
            simplex = NelderMead(search.phase2_objective(temperature), x, config.step, signs)
            stop_reason = _run_phase(
                search, simplex, 2, config.max_iterations_phase2, config, trace, temperature=temperature
            )
            x = search.best_x
            logger.info(f"Phase 2 at T={temperature}: {stop_reason}, best eta {search.best_eta:.9f}")
    else:
        logger.warning(f"No feasible metric found on {model.describe()}")

    best_x = search.best_x if search.best_x is not None else search.best_min_eig_x
    best_metric = search.metric(best_x)
    report = exponent_of_metric(model, best_metric)

    bound = exponent_bound(model)
    if bound is not None and report.eta > bound + 1e-9:
        logger.error(f"Exponent {report.eta} exceeds the compact-model bound {bound}")

    trace.best_eta = report.eta
    best_key = np.asarray(best_x, dtype=np.float64).tobytes()
    trace.best_iteration = next((i for i, key in enumerate(search.row_keys) if key == best_key), None)
    trace.stop_reason = stop_reason
    return best_metric, report, trace
