"""Recursive approximation of the expected M-hop progress.

With the cell W_m approximated by a square of area |W_m| extending the
previous progress d̃_{m-1}, the receivers of W_m^+ are Poisson with mean
c_m = λ(1-p)/2 (|W_m| + d̃_{m-1}√|W_m|), spread uniformly over a span
(√|W_m| + d̃_{m-1})/2. The expected furthest one sets d̃_m.
"""
import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Sequence, Tuple

import numpy as np
from django.core.cache import cache
from django.core.exceptions import ImproperlyConfigured

from apps.netmodel.network import Scheme

from .cells import cell_area
from .closed_form import max_uniform_factor, w1_area
from .params import AnalyticParams

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class AnalyticTable:
    """d̃_m, |W_m| and c_m for m = 1 … M (index 0 holds m = 1)."""
    params: AnalyticParams
    d_tilde: np.ndarray
    cell_area: np.ndarray
    c: np.ndarray

    @property
    def diversity(self) -> int:
        return int(self.d_tilde.size)

    def hop_progress(self) -> float:
        """d̃_M - d̃_{M-1}, with d̃_0 = 0."""
        previous = float(self.d_tilde[-2]) if self.d_tilde.size > 1 else 0.0
        return float(self.d_tilde[-1]) - previous

    def prd(self) -> float:
        """Rλp (d̃_M - d̃_{M-1})."""
        p = self.params
        return p.rate * p.intensity * p.map_p * self.hop_progress()

    def as_rows(self) -> Sequence[Dict[str, float]]:
        return [
            {"m": m + 1, "d_tilde": float(self.d_tilde[m]), "cell_area": float(self.cell_area[m]), "c": float(self.c[m])}
            for m in range(self.diversity)
        ]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "d_tilde": self.d_tilde.tolist(),
            "cell_area": self.cell_area.tolist(),
            "c": self.c.tolist(),
            "prd": self.prd(),
        }


def progress_step(area: float, previous: float, intensity: float, map_p: float) -> Tuple[float, float]:
    """One recursion step: (c_m, d̃_m) from |W_m| and d̃_{m-1}."""
    root = math.sqrt(area)
    c = intensity * (1.0 - map_p) / 2.0 * (area + previous * root)
    d_tilde = (root + previous) / 2.0 * float(max_uniform_factor(c))
    return c, d_tilde


def progress_recursion(cell_areas: Sequence[float], intensity: float, map_p: float) -> Tuple[np.ndarray, np.ndarray]:
    """Run the recursion over given cell areas, starting from d̃_0 = 0.

    Returns:
        ``(d_tilde, c)`` arrays of the same length as ``cell_areas``.
    """
    d_tilde = np.empty(len(cell_areas))
    c = np.empty(len(cell_areas))
    previous = 0.0
    for index, area in enumerate(cell_areas):
        c[index], d_tilde[index] = progress_step(float(area), previous, intensity, map_p)
        previous = d_tilde[index]
    return d_tilde, c


def _compute_table(params: AnalyticParams) -> AnalyticTable:
    areas = [w1_area(params)]
    c1, d1 = progress_step(areas[0], 0.0, params.intensity, params.map_p)
    d_tilde = [d1]
    cs = [c1]
    for m in range(2, params.diversity + 1):
        area = cell_area(m, params, d_tilde)
        c_m, d_m = progress_step(area, d_tilde[-1], params.intensity, params.map_p)
        areas.append(area)
        cs.append(c_m)
        d_tilde.append(d_m)
    return AnalyticTable(params=params, d_tilde=np.array(d_tilde), cell_area=np.array(areas), c=np.array(cs))


def expected_progress_approx(params: AnalyticParams) -> AnalyticTable:
    """d̃_1 … d̃_M with their cell areas; cached by parameter key.

    |W_1| comes from the closed form, later cells from the integrator.

    Raises:
        IntegrationError: If a cell integration does not converge.
    """
    key = params.cache_key("analytic-table")
    try:
        cached = cache.get(key)
    except ImproperlyConfigured:
        cached = None
    if cached is not None:
        return AnalyticTable(params=params, d_tilde=np.array(cached["d_tilde"]),
                             cell_area=np.array(cached["cell_area"]), c=np.array(cached["c"]))

    table = _compute_table(params)
    logger.info(
        f"Analytic table {params.scheme.value} M={params.diversity} "
        f"(lambda={params.intensity:g}, p={params.map_p:g}, R={params.rate:g}, alpha={params.alpha:g}): "
        f"d_tilde={np.round(table.d_tilde, 5).tolist()}"
    )
    try:
        cache.set(key, table.to_dict())
    except ImproperlyConfigured:
        pass
    return table


def one_hop_progress(params: AnalyticParams) -> float:
    """d̃_1, identical for every combining scheme."""
    c1, d1 = progress_step(w1_area(params), 0.0, params.intensity, params.map_p)
    return d1


def analytic_prd(params: AnalyticParams) -> float:
    """PRD of the approximation: Rλp d̃_1 for NC, Rλp (d̃_M - d̃_{M-1}) otherwise."""
    if params.scheme is Scheme.NC or params.diversity == 1:
        return params.rate * params.intensity * params.map_p * one_hop_progress(params)
    return expected_progress_approx(params).prd()
