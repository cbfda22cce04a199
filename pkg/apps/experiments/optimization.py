"""Maximization of the PRD over the code rate R and the access probability p.

The analytic objective is smooth and unimodal, so it is searched with nested
golden sections (p outside, R inside). The simulated objective is noisy: it is
scanned on a grid and then refined by a shrinking pattern search. Every
simulated evaluation reuses the same master seed, so all candidates see the
same node fields and fading (common random numbers).
"""
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from apps.analytic.params import AnalyticParams, IntegrationSettings
from apps.analytic.recursion import analytic_prd
from apps.netmodel.network import NetworkConfig, Scheme
from core.exceptions import ConfigurationError

from .estimation import DEFAULT_TRIALS, estimate_progress, progress_rate_density

logger = logging.getLogger(__name__)

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
INV_PHI_SQ = (3.0 - math.sqrt(5.0)) / 2.0


class Objective(str, Enum):
    SIMULATED = "simulated"
    ANALYTIC = "analytic"


@dataclass(frozen=True)
class SearchBounds:
    """Box searched by the optimizer and the steps of the simulated grid."""
    rate: Tuple[float, float] = (0.1, 10.0)
    map_p: Tuple[float, float] = (0.01, 0.9)
    rate_step: float = 0.25
    map_p_step: float = 0.02
    tolerance: float = 1e-3
    refinements: int = 2

    def __post_init__(self) -> None:
        for name, (low, high) in (("rate", self.rate), ("map_p", self.map_p)):
            if not low < high:
                raise ConfigurationError(f"{name} bounds must satisfy low < high, got ({low}, {high})")
        if self.map_p[0] <= 0 or self.map_p[1] >= 1:
            raise ConfigurationError(f"map_p bounds must lie in (0, 1), got {self.map_p}")
        if self.rate[0] <= 0:
            raise ConfigurationError(f"rate bounds must be > 0, got {self.rate}")
        if not (self.rate_step > 0 and self.map_p_step > 0 and self.tolerance > 0):
            raise ConfigurationError("steps and tolerance must be > 0")
        if self.refinements < 0:
            raise ConfigurationError(f"refinements must be >= 0, got {self.refinements}")

    @classmethod
    def around(cls, rate: float, map_p: float, rate_span: float = 0.5, map_p_span: float = 0.04,
               within: Optional["SearchBounds"] = None) -> "SearchBounds":
        """Box of half-widths ``rate_span`` and ``map_p_span`` around a point, clipped to ``within``."""
        outer = within or cls()
        return cls(
            rate=(max(outer.rate[0], rate - rate_span), min(outer.rate[1], rate + rate_span)),
            map_p=(max(outer.map_p[0], map_p - map_p_span), min(outer.map_p[1], map_p + map_p_span)),
            rate_step=outer.rate_step, map_p_step=outer.map_p_step,
            tolerance=outer.tolerance, refinements=min(outer.refinements, 1),
        )



@dataclass(frozen=True)
class TracePoint:
    rate: float
    map_p: float
    prd: float
    std_error: float = 0.0


@dataclass
class OptimizationResult:
    """Best operating point found and every point evaluated on the way.

    Attributes:
        rate_star: Optimal code rate R*.
        map_p_star: Optimal access probability p*.
        prd_star: PRD at the optimum; no trace point exceeds it.
        objective: Simulated or analytic.
        trace: Every evaluation in order.
        std_error: Standard error of ``prd_star`` (0 for the analytic objective).
        warning: Set when the simulated surface showed several separated peaks.
    """
    rate_star: float
    map_p_star: float
    prd_star: float
    objective: Objective
    trace: List[TracePoint] = field(default_factory=list)
    std_error: float = 0.0
    warning: Optional[str] = None


def golden_section_max(func: Callable[[float], float], low: float, high: float, tol: float = 1e-3) -> Tuple[float, float]:
    """Maximize a unimodal function of one variable on ``[low, high]``.

    Returns:
        ``(x, f(x))`` at the midpoint of the final bracket.
    """
    dist = high - low
    if dist <= tol:
        x = (low + high) / 2
        return x, func(x)

    steps = int(math.ceil(math.log(tol / dist) / math.log(INV_PHI)))
    c = low + INV_PHI_SQ * dist
    d = low + INV_PHI * dist
    yc = func(c)
    yd = func(d)
    for _ in range(steps - 1):
        if yc > yd:
            high, d, yd = d, c, yc
            dist *= INV_PHI
            c = low + INV_PHI_SQ * dist
            yc = func(c)
        else:
            low, c, yc = c, d, yd
            dist *= INV_PHI
            d = low + INV_PHI * dist
            yd = func(d)

    x = (low + d) / 2 if yc > yd else (c + high) / 2
    return x, func(x)


def _grid(low: float, high: float, step: float) -> np.ndarray:
    count = int(math.floor((high - low) / step + 1e-9)) + 1
    values = low + step * np.arange(count)
    if high - values[-1] > 1e-9:
        values = np.append(values, high)
    return np.round(values, 10)


class _Evaluator:
    """Memoized PRD evaluations that append to the trace."""

    def __init__(self, func: Callable[[float, float], Tuple[float, float]]) -> None:
        self.func = func
        self.trace: List[TracePoint] = []
        self.seen: Dict[Tuple[float, float], TracePoint] = {}

    def __call__(self, rate: float, map_p: float) -> TracePoint:
        key = (round(rate, 10), round(map_p, 10))
        if key not in self.seen:
            prd, se = self.func(rate, map_p)
            point = TracePoint(rate=key[0], map_p=key[1], prd=prd, std_error=se)
            self.seen[key] = point
            self.trace.append(point)
        return self.seen[key]

    def best(self) -> TracePoint:
        return max(self.trace, key=lambda point: point.prd)


def joint_search(template: NetworkConfig) -> bool:
    """NC, RC and single-block IRC optimize R and p together."""
    return not (template.scheme is Scheme.IRC and template.diversity > 1)


def _analytic_search(template: NetworkConfig, bounds: SearchBounds, fixed_p: Optional[float],
                     integration: IntegrationSettings) -> OptimizationResult:
    def prd(rate: float, map_p: float) -> Tuple[float, float]:
        params = AnalyticParams.from_network(template.with_changes(rate=rate, map_p=map_p), integration)
        return analytic_prd(params), 0.0

    evaluate = _Evaluator(prd)

    def best_over_rate(map_p: float) -> float:
        _, value = golden_section_max(lambda r: evaluate(r, map_p).prd, *bounds.rate, tol=bounds.tolerance)
        return value

    if fixed_p is None:
        golden_section_max(best_over_rate, *bounds.map_p, tol=bounds.tolerance)
    else:
        best_over_rate(fixed_p)

    best = evaluate.best()
    return OptimizationResult(
        rate_star=best.rate, map_p_star=best.map_p, prd_star=best.prd,
        objective=Objective.ANALYTIC, trace=evaluate.trace,
    )


def _separated_peaks(evaluate: _Evaluator, rates: np.ndarray, ps: np.ndarray, best: TracePoint) -> int:
    """Grid local maxima, other than the best, that stand clear of their neighbours."""
    peaks = 0
    for i, rate in enumerate(rates):
        for j, map_p in enumerate(ps):
            point = evaluate.seen[(round(rate, 10), round(map_p, 10))]
            if point is best:
                continue
            neighbours = []
            for di, dj in ((-1, 0), (1, 0), (0, -1), (0, 1)):
                if 0 <= i + di < rates.size and 0 <= j + dj < ps.size:
                    neighbours.append(evaluate.seen[(round(rates[i + di], 10), round(ps[j + dj], 10))])
            if neighbours and all(
                point.prd - n.prd > 2 * math.hypot(point.std_error, n.std_error) for n in neighbours
            ) and best.prd - point.prd > 2 * math.hypot(point.std_error, best.std_error):
                peaks += 1
    return peaks


def _simulated_search(template: NetworkConfig, bounds: SearchBounds, fixed_p: Optional[float],
                      trials: int, seed: int, workers: int) -> OptimizationResult:
    def prd(rate: float, map_p: float) -> Tuple[float, float]:
        config = template.with_changes(rate=rate, map_p=map_p)
        estimate = progress_rate_density(config, estimate_progress(config, trials, seed, workers))
        return estimate.mean, estimate.std_error

    evaluate = _Evaluator(prd)
    rates = _grid(*bounds.rate, bounds.rate_step)
    ps = np.array([fixed_p]) if fixed_p is not None else _grid(*bounds.map_p, bounds.map_p_step)
    logger.info(f"Simulated grid for {template.scheme.value} M={template.diversity}: {rates.size} x {ps.size} points")
    for rate in rates:
        for map_p in ps:
            evaluate(float(rate), float(map_p))

    grid_best = evaluate.best()
    peaks = _separated_peaks(evaluate, rates, ps, grid_best)

    rate_step, p_step = bounds.rate_step, bounds.map_p_step
    center = grid_best
    for _ in range(bounds.refinements):
        rate_step /= 2
        p_step = p_step / 2 if fixed_p is None else 0.0
        for dr in (-rate_step, 0.0, rate_step):
            for dp in (-p_step, 0.0, p_step) if p_step else (0.0,):
                rate = min(max(center.rate + dr, bounds.rate[0]), bounds.rate[1])
                if fixed_p is None:
                    map_p = min(max(center.map_p + dp, bounds.map_p[0]), bounds.map_p[1])
                else:
                    map_p = fixed_p
                evaluate(rate, map_p)
        center = evaluate.best()

    best = evaluate.best()
    warning = None
    if peaks:
        warning = f"simulated PRD surface has {peaks} separated secondary peak(s); returning the best point"
        logger.warning(f"{template.scheme.value} M={template.diversity}: {warning}")
    return OptimizationResult(
        rate_star=best.rate, map_p_star=best.map_p, prd_star=best.prd, std_error=best.std_error,
        objective=Objective.SIMULATED, trace=evaluate.trace, warning=warning,
    )


def optimize_prd(
    objective: Objective,
    template: NetworkConfig,
    bounds: Optional[SearchBounds] = None,
    trials: int = DEFAULT_TRIALS,
    seed: Optional[int] = None,
    workers: int = 1,
    nc_map_p: Optional[float] = None,
    integration: Optional[IntegrationSettings] = None,
) -> OptimizationResult:
    """Find (R*, p*) maximizing the PRD of ``template``'s scheme.

    NC, RC and single-block IRC optimize R and p jointly. IRC with M > 1
    keeps p at the NC optimum (``nc_map_p``, computed with the same objective
    when omitted) and optimizes R only.

    Args:
        objective: Simulated or analytic PRD.
        template: Operating point; its rate and map_p are ignored.
        bounds: Search box and grid steps.
        trials: Episodes per simulated evaluation.
        seed: Master seed shared by every simulated evaluation.
        workers: Worker processes per simulated evaluation.
        nc_map_p: Access probability of the NC optimum, for IRC with M > 1.
        integration: Cell integrator settings for the analytic objective.

    Returns:
        The optimization result.
    """
    objective = Objective(objective)
    bounds = bounds or SearchBounds()
    seed = template.seed if seed is None else seed
    integration = integration or IntegrationSettings()

    fixed_p = None
    if not joint_search(template):
        if nc_map_p is None:
            nc = optimize_prd(objective, template.for_scheme(Scheme.NC), bounds, trials, seed, workers,
                              integration=integration)
            nc_map_p = nc.map_p_star
        fixed_p = nc_map_p

    logger.info(
        f"Optimizing {objective.value} PRD for {template.scheme.value} M={template.diversity} "
        f"alpha={template.alpha:g}" + (f" at fixed p={fixed_p:g}" if fixed_p is not None else "")
    )
    if objective is Objective.ANALYTIC:
        result = _analytic_search(template, bounds, fixed_p, integration)
    else:
        result = _simulated_search(template, bounds, fixed_p, trials, seed, workers)
    logger.info(
        f"Optimum {template.scheme.value} M={template.diversity}: R*={result.rate_star:.4g}, "
        f"p*={result.map_p_star:.4g}, PRD*={result.prd_star:.5g}"
    )
    return result
