"""Closed-form results for Rayleigh fading with PPP ALOHA interference."""
import math
from typing import Union

import numpy as np

from core.exceptions import DomainError

from .params import AnalyticParams

ArrayOrFloat = Union[float, np.ndarray]


def spectral_factor(alpha: float) -> float:
    """G(α) = πδ / sin(πδ) with δ = 2/α.

    Raises:
        DomainError: If ``alpha`` <= 2, where the interference diverges.
    """
    if not alpha > 2:
        raise DomainError(f"G(alpha) diverges for alpha <= 2, got alpha={alpha}")
    delta = 2.0 / alpha
    return math.pi * delta / math.sin(math.pi * delta)


def _exponent_coefficient(params: AnalyticParams) -> float:
    """λpG(α)(2^R - 1)^δ."""
    if not params.rate > 0:
        raise DomainError(f"rate must be > 0, got {params.rate}")
    return params.intensity * params.map_p * spectral_factor(params.alpha) * params.threshold ** params.delta


def cell_length_scale(params: AnalyticParams) -> float:
    """L such that the one-slot decoding cell has area L²."""
    return 1.0 / math.sqrt(_exponent_coefficient(params))


def w1_area(params: AnalyticParams) -> float:
    """|W_1| = ∫ P(success) dA = 1 / (λpG(α)(2^R - 1)^δ).

    The integrand is exp(-πλpG(α)(2^R - 1)^δ r²), so the π of the exponent
    cancels against the 2πr of the area element. Later cells come from the
    integrator in :mod:`apps.analytic.cells`, which uses the same measure.

    Raises:
        DomainError: If ``rate`` <= 0 (unbounded cell).
    """
    return 1.0 / _exponent_coefficient(params)


def success_probability(r: ArrayOrFloat, params: AnalyticParams) -> ArrayOrFloat:
    """P(log2(1 + SIR) >= R) for a link of length ``r``.

    Equal to exp(-πλpG(α)(2^R - 1)^δ r²).
    """
    distance = np.asarray(r, dtype=float)
    if np.any(distance < 0):
        raise DomainError("distance must be >= 0")
    probability = np.exp(-math.pi * _exponent_coefficient(params) * distance ** 2)
    return float(probability) if probability.ndim == 0 else probability


def max_uniform_factor(c: ArrayOrFloat) -> ArrayOrFloat:
    """E[K/(K + 1)] for K ~ Poisson(c), i.e. 1 - (1 - e^{-c})/c.

    Tends to 0 as c -> 0 and to 1 as c -> ∞.
    """
    values = np.asarray(c, dtype=float)
    if np.any(values < 0):
        raise DomainError("Poisson mean must be >= 0")
    small = values < 1e-8
    safe = np.where(small, 1.0, values)
    factor = np.where(small, values / 2.0, 1.0 + np.expm1(-safe) / safe)
    return float(factor) if factor.ndim == 0 else factor


def expected_max_progress(c: ArrayOrFloat, span: ArrayOrFloat) -> ArrayOrFloat:
    """E[max of K uniform points on [0, span]] with K ~ Poisson(c); empty max counts 0."""
    return span * max_uniform_factor(c)
