"""Monte Carlo estimators of hop progress, PRD and link success.

Episode ``i`` of a run with master seed ``s`` always draws from
``np.random.default_rng([s, i])``, so estimates do not depend on how the
episodes are spread over worker processes.
"""
import logging
import math
from collections.abc import Sequence as SequenceABC
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from apps.netmodel.channel import mutual_information, sir_field
from apps.netmodel.network import NetworkConfig, Scheme, draw_slot, sample_network
from apps.protocol.episode import run_episode
from core.exceptions import ConfigurationError

logger = logging.getLogger(__name__)

MIN_TRIALS = 100
DEFAULT_TRIALS = 10_000
Z_95 = 1.96


@dataclass(frozen=True)
class Estimate:
    """Sample mean with its standard error.

    Attributes:
        mean: Sample mean.
        std_error: Sample standard deviation over √n.
        n: Number of trials.
    """
    mean: float
    std_error: float
    n: int

    @classmethod
    def from_samples(cls, samples: np.ndarray) -> "Estimate":
        values = np.asarray(samples, dtype=float)
        n = int(values.size)
        if n == 0:
            raise ConfigurationError("an estimate needs at least one sample")
        std_error = float(values.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
        return cls(mean=float(values.mean()), std_error=std_error, n=n)

    @property
    def ci95(self) -> Tuple[float, float]:
        half = Z_95 * self.std_error
        return self.mean - half, self.mean + half

    def scaled(self, factor: float) -> "Estimate":
        return Estimate(mean=self.mean * factor, std_error=self.std_error * abs(factor), n=self.n)

    def to_dict(self) -> Dict[str, Any]:
        low, high = self.ci95
        return {"mean": self.mean, "std_error": self.std_error, "n": self.n, "ci95_low": low, "ci95_high": high}


@dataclass(frozen=True)
class PrdEstimate(Estimate):
    """PRD estimate; ``anomaly`` marks a hop-progress difference significantly below zero."""
    anomaly: bool = False


@dataclass(frozen=True, eq=False)
class ProgressSample(SequenceABC):
    """Estimates of d_1 … d_M together with the per-episode progress matrix.

    Behaves as a sequence of :class:`Estimate`.

    Attributes:
        samples: ``(trials, M)`` matrix of D values, one row per episode.
        failure_rate: Fraction of episodes that hit the retry cap.
        collision_rate: Equal-code collisions per contention round.
        mismatch_rate: Contention winners differing from the exact argmax,
            per contention round.
    """
    samples: np.ndarray
    failure_rate: float = 0.0
    collision_rate: float = 0.0
    mismatch_rate: float = 0.0

    @cached_property
    def estimates(self) -> List[Estimate]:
        return [Estimate.from_samples(self.samples[:, hop]) for hop in range(self.samples.shape[1])]

    def __getitem__(self, index):
        return self.estimates[index]

    def __len__(self) -> int:
        return int(self.samples.shape[1])

    @property
    def trials(self) -> int:
        return int(self.samples.shape[0])


def _chunks(total: int, workers: int) -> List[Tuple[int, int]]:
    size = max(1, math.ceil(total / (max(workers, 1) * 4)))
    return [(start, min(start + size, total)) for start in range(0, total, size)]


def _map_chunks(worker: Callable, args: Tuple, total: int, workers: int) -> List[Any]:
    """Run ``worker(*args, start, stop)`` over contiguous chunks; results keep chunk order."""
    chunks = _chunks(total, workers)
    if workers <= 1 or len(chunks) == 1:
        return [worker(*args, start, stop) for start, stop in chunks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(worker, *args, start, stop) for start, stop in chunks]
        return [future.result() for future in futures]


def _episode_chunk(config: NetworkConfig, seed: int, start: int, stop: int) -> Dict[str, np.ndarray]:
    count = stop - start
    progress = np.empty((count, config.diversity))
    failed = np.zeros(count, dtype=bool)
    stats = np.zeros((count, 3), dtype=np.int64)
    for row, index in enumerate(range(start, stop)):
        rng = np.random.default_rng([seed, index])
        real = sample_network(config, rng)
        result = run_episode(config, real, rng)
        progress[row] = result.progress
        failed[row] = result.failed
        stats[row] = (result.collisions, result.mismatches, result.contention_rounds)
    return {"progress": progress, "failed": failed, "stats": stats}


def estimate_progress(config: NetworkConfig, trials: int = DEFAULT_TRIALS, seed: Optional[int] = None,
                      workers: int = 1) -> ProgressSample:
    """Estimate d_1 … d_M from independent episodes.

    Failed episodes are kept with their frozen progress.

    Args:
        config: Operating point; ``config.seed`` is used when ``seed`` is None.
        trials: Number of episodes, at least ``MIN_TRIALS``.
        seed: Master seed.
        workers: Worker processes.

    Returns:
        The progress sample.

    Raises:
        ConfigurationError: If fewer than ``MIN_TRIALS`` trials are requested.
    """
    if trials < MIN_TRIALS:
        raise ConfigurationError(f"trials must be >= {MIN_TRIALS}, got {trials}")
    seed = config.seed if seed is None else seed

    parts = _map_chunks(_episode_chunk, (config, seed), trials, workers)
    progress = np.vstack([part["progress"] for part in parts])
    failed = np.concatenate([part["failed"] for part in parts])
    stats = np.vstack([part["stats"] for part in parts]).sum(axis=0)

    rounds = int(stats[2])
    sample = ProgressSample(
        samples=progress,
        failure_rate=float(failed.mean()),
        collision_rate=stats[0] / rounds if rounds else 0.0,
        mismatch_rate=stats[1] / rounds if rounds else 0.0,
    )
    logger.debug(
        f"{config.scheme.value} M={config.diversity} R={config.rate:g} p={config.map_p:g}: "
        f"d={np.round(progress.mean(axis=0), 5).tolist()} over {trials} episodes"
    )
    return sample


def progress_rate_density(config: NetworkConfig, d: Sequence[Estimate]) -> PrdEstimate:
    """PRD = Rλp d_1 for NC and Rλp (d_M - d_{M-1}) for IRC/RC.

    With a :class:`ProgressSample` the difference uses paired per-episode
    samples; with bare estimates the two errors are combined as independent.
    A difference more than two standard errors below zero is flagged.
    """
    factor = config.rate * config.intensity * config.map_p
    if config.scheme is Scheme.NC or len(d) == 1:
        one_hop = d[0].scaled(factor)
        return PrdEstimate(mean=one_hop.mean, std_error=one_hop.std_error, n=one_hop.n)

    if isinstance(d, ProgressSample):
        hop = Estimate.from_samples(d.samples[:, -1] - d.samples[:, -2])
    else:
        last, previous = d[-1], d[-2]
        hop = Estimate(
            mean=last.mean - previous.mean,
            std_error=math.hypot(last.std_error, previous.std_error),
            n=min(last.n, previous.n),
        )
    anomaly = hop.mean + 2 * hop.std_error < 0
    if anomaly:
        logger.warning(
            f"Negative hop progress {hop.mean:.5g} ± {hop.std_error:.2g} for {config.scheme.value} "
            f"M={config.diversity} R={config.rate:g} p={config.map_p:g}"
        )
    prd = hop.scaled(factor)
    return PrdEstimate(mean=prd.mean, std_error=prd.std_error, n=prd.n, anomaly=anomaly)


def _probe_chunk(config: NetworkConfig, distances: np.ndarray, seed: int, start: int, stop: int) -> np.ndarray:
    probes = np.column_stack([distances, np.zeros_like(distances)])
    hits = np.empty((stop - start, distances.size), dtype=bool)
    for row, index in enumerate(range(start, stop)):
        rng = np.random.default_rng([seed, index])
        real = sample_network(config, rng, probes=probes)
        listeners = np.arange(real.n_nodes, real.n_nodes + distances.size)
        slot = draw_slot(real, config, real.source_index, rng, listeners=listeners)
        sir = sir_field(slot, real, config.alpha, real.source_index)
        hits[row] = mutual_information(sir) >= config.rate
    return hits


def estimate_success_probability(config: NetworkConfig, distances: Sequence[float], slots: int,
                                 seed: Optional[int] = None, workers: int = 1) -> List[Estimate]:
    """Estimate P(log2(1 + SIR) >= R) for links of the given lengths.

    Every slot draws a fresh node field with listen-only probes at
    ``(r, 0)`` for each distance r, and one ALOHA slot with the source
    transmitting.
    """
    if slots < 1:
        raise ConfigurationError(f"slots must be >= 1, got {slots}")
    seed = config.seed if seed is None else seed
    radii = np.asarray(distances, dtype=float)
    if np.any(radii <= 0):
        raise ConfigurationError("probe distances must be > 0")

    hits = np.vstack(_map_chunks(_probe_chunk, (config, radii, seed), slots, workers))
    return [Estimate.from_samples(hits[:, column]) for column in range(radii.size)]
