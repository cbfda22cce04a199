"""Average decoding-cell areas by numerical integration over the plane.

A point v belongs to the m-slot decoding cell when the metric accumulated from
the reference transmitters η_0 = (0, 0), η_k = (d̃_k, 0) reaches the rate. Each
slot term has its own Rayleigh gain and its own interference, the shot noise
of a fresh PPP of transmitters with intensity λp. That shot noise is a
one-sided stable variable of index δ scaled by (πλpG(α))^{1/δ}, so it is
sampled exactly instead of simulating finite interferer fields.

The gain of the η_0 term is integrated in closed form (conditional Monte
Carlo): given every other term, the point decodes iff
|h_0|² >= θ_0 |v|^α I_0, which has probability exp(-θ_0 |v|^α I_0).
"""
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.stats import qmc

from apps.netmodel.network import DISTANCE_FLOOR, Scheme
from core.exceptions import ContractViolation, IntegrationError

from .closed_form import cell_length_scale, spectral_factor
from .params import AnalyticParams, IntegrationSettings

logger = logging.getLogger(__name__)

# Keeps Sobol uniforms off the endpoints where the stable sampler is singular.
_UNIFORM_EPS = 1e-12


@dataclass(frozen=True, eq=False)
class SampleBank:
    """Quasi-random draws shared by every grid point of an integration.

    Attributes:
        stable: ``(n, terms)`` unit positive-stable variables, one column per
            slot term.
        fading: ``(n, terms)`` unit-mean exponential gains; column 0 is never
            used because that term is integrated in closed form.
    """
    stable: np.ndarray
    fading: np.ndarray

    @property
    def size(self) -> int:
        return int(self.stable.shape[0])

    @property
    def terms(self) -> int:
        return int(self.stable.shape[1])


def sample_positive_stable(delta: float, angle_uniform: np.ndarray, exp_uniform: np.ndarray) -> np.ndarray:
    """Positive stable variables with Laplace transform exp(-s^δ), 0 < δ < 1.

    Uses Kanter's representation with U ~ Uniform(0, π) and E ~ Exp(1) built
    from the given uniforms.
    """
    if not 0 < delta < 1:
        raise ContractViolation(f"stable index must lie in (0, 1), got {delta}")
    angle = math.pi * angle_uniform
    exponential = -np.log(exp_uniform)
    shape = (1.0 - delta) / delta
    return (
        np.sin(delta * angle)
        * np.sin((1.0 - delta) * angle) ** shape
        / (np.sin(angle) ** (1.0 / delta) * exponential ** shape)
    )


@lru_cache(maxsize=32)
def sample_bank(settings: IntegrationSettings, delta: float, terms: int) -> SampleBank:
    """Scrambled Sobol bank with ``terms`` slot terms for stable index ``delta``."""
    exponent = max(4, math.ceil(math.log2(settings.samples)))
    sobol = qmc.Sobol(d=3 * terms, scramble=True, seed=np.random.default_rng(settings.seed))
    uniforms = np.clip(sobol.random_base2(m=exponent), _UNIFORM_EPS, 1.0 - _UNIFORM_EPS)

    stable = sample_positive_stable(delta, uniforms[:, :terms], uniforms[:, terms:2 * terms])
    fading = -np.log(uniforms[:, 2 * terms:])
    logger.debug(f"Built Sobol bank: {uniforms.shape[0]} samples x {terms} terms (delta={delta:.4f})")
    return SampleBank(stable=stable, fading=fading)


def interference_scale(params: AnalyticParams) -> float:
    """(πλpG(α))^{1/δ}: scale turning a unit stable variable into interference."""
    return (math.pi * params.intensity * params.map_p * spectral_factor(params.alpha)) ** (1.0 / params.delta)


def point_success(points: np.ndarray, eta: np.ndarray, params: AnalyticParams, bank: SampleBank) -> np.ndarray:
    """Probability that each point decodes from the transmitters ``eta``.

    Args:
        points: ``(k, 2)`` evaluation points.
        eta: ``(m, 2)`` reference transmitters, η_0 first.
        params: The operating point (scheme, rate, alpha, λp).
        bank: Draws with at least ``m`` terms.

    Returns:
        ``(k,)`` decode probabilities.
    """
    m = eta.shape[0]
    if bank.terms < m:
        raise ContractViolation(f"sample bank has {bank.terms} terms, {m} needed")
    scale = interference_scale(params)

    d0 = np.maximum(np.hypot(points[:, 0] - eta[0, 0], points[:, 1] - eta[0, 1]), DISTANCE_FLOOR)
    origin_load = scale * d0 ** params.alpha

    if m == 1:
        theta = np.full((points.shape[0], bank.size), params.threshold)
    else:
        offsets = points[:, None, :] - eta[None, 1:, :]
        distance = np.maximum(np.hypot(offsets[..., 0], offsets[..., 1]), DISTANCE_FLOOR)
        path_gain = distance ** (-params.alpha)
        sir = bank.fading[None, :, 1:m] * path_gain[:, None, :] / (scale * bank.stable[None, :, 1:m])
        if params.scheme is Scheme.IRC:
            missing_bits = np.maximum(params.rate - np.log2(1.0 + sir).sum(axis=2), 0.0)
            theta = np.expm1(missing_bits * math.log(2.0))
        else:
            theta = np.maximum(params.threshold - sir.sum(axis=2), 0.0)

    exponent = theta * origin_load[:, None] * bank.stable[None, :, 0]
    return np.exp(-exponent).mean(axis=1)


def cell_area(m: int, params: AnalyticParams, d_tilde_prefix: Sequence[float]) -> float:
    """Average area |W_m| of the m-slot decoding cell.

    Integrates the decode probability on a polar grid centred between the
    transmitters, using the symmetry about the x-axis. Rings are added until
    one contributes less than ``tail_tolerance`` of the accumulated area.

    Args:
        m: Number of slot terms, 1 <= m.
        params: Operating point and integrator controls.
        d_tilde_prefix: d̃_1 … d̃_{m-1}.

    Returns:
        The area.

    Raises:
        ContractViolation: If the prefix length is not m - 1.
        IntegrationError: If the tail has not vanished within the radial extent.
    """
    if m < 1:
        raise ContractViolation(f"m must be >= 1, got {m}")
    if len(d_tilde_prefix) != m - 1:
        raise ContractViolation(f"cell {m} needs {m - 1} prior progress values, got {len(d_tilde_prefix)}")

    settings = params.integration
    bank = sample_bank(settings, params.delta, max(m, params.diversity))

    eta = np.zeros((m, 2), dtype=float)
    eta[1:, 0] = np.asarray(d_tilde_prefix, dtype=float)
    center = float(eta[:, 0].mean())
    spread = float(np.abs(eta[:, 0] - center).max())

    length = cell_length_scale(params)
    dr = settings.radial_step * length
    n_angles = max(1, round(math.pi / settings.angular_step))
    d_theta = math.pi / n_angles
    angles = (np.arange(n_angles) + 0.5) * d_theta
    directions = np.column_stack([np.cos(angles), np.sin(angles)])

    min_radius = spread + length
    max_radius = spread + settings.radial_extent * length

    accumulated = 0.0
    ring_mass = 0.0
    ring = 0
    while True:
        inner = ring * dr
        outer = inner + dr
        if inner > max_radius:
            raise IntegrationError(
                f"decoding cell {m} did not converge within radius {max_radius:.4g}",
                diagnostics={
                    "radius": inner,
                    "last_ring_mass": ring_mass,
                    "accumulated": accumulated,
                    "tail_tolerance": settings.tail_tolerance,
                },
            )
        points = directions * (0.5 * (inner + outer))
        points[:, 0] += center
        probability = point_success(points, eta, params, bank)
        # Both half-planes: sector area (outer² - inner²)/2 · dθ, doubled.
        ring_mass = float(probability.sum()) * (outer ** 2 - inner ** 2) * d_theta
        accumulated += ring_mass
        ring += 1
        if outer >= min_radius and ring_mass <= settings.tail_tolerance * accumulated:
            break

    logger.debug(f"|W_{m}| = {accumulated:.6g} after {ring} rings (scheme={params.scheme.value})")
    return accumulated
