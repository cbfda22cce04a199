"""Poisson node fields, slotted-ALOHA roles and Rayleigh block fading.

The reference source sits at the origin (Slivnyak conditioning); every other
node is a point of a homogeneous PPP truncated to a disc around it.
"""
import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum, IntEnum
from functools import cached_property
from typing import Any, Optional, Sequence

import numpy as np

from core.exceptions import ConfigurationError, ContractViolation

logger = logging.getLogger(__name__)

# Windows expected to hold fewer nodes than this are statistically meaningless.
MIN_EXPECTED_NODES = 100
# Default window radius is DEFAULT_WINDOW_SCALE / sqrt(intensity).
DEFAULT_WINDOW_SCALE = 20.0
# Floor applied to every transmitter-receiver distance.
DISTANCE_FLOOR = 1e-9


class Scheme(str, Enum):
    """Combining scheme used by receivers."""
    NC = "NC"
    RC = "RC"
    IRC = "IRC"


class Selection(str, Enum):
    """How the next forwarding relay is chosen among decoders."""
    ARGMAX = "argmax"
    CONTENTION = "contention"


class Role(IntEnum):
    """Per-slot ALOHA role of a node."""
    RECEIVE = 0
    TRANSMIT = 1


@dataclass(frozen=True)
class NetworkConfig:
    """Parameters of one simulated operating point.

    Attributes:
        intensity: Node intensity λ (nodes per unit area).
        map_p: Medium-access probability p of slotted ALOHA.
        alpha: Path-loss exponent, strictly above 2.
        rate: Code rate R in bits/s/Hz.
        diversity: Diversity order M (blocks a node may combine).
        scheme: NC, RC or IRC.
        window_radius: Radius of the simulation disc. ``None`` selects
            ``DEFAULT_WINDOW_SCALE / sqrt(intensity)``.
        seed: Master seed of the run (64-bit unsigned).
        retry_cap: Retransmissions allowed per hop when nobody can be selected.
        selection: Exact argmax or the P-bit pulse contention.
        contention_bits: Number of contention time units P.
        contention_d_max: Quantization range of the contention encoder;
            ``None`` means three times the analytic one-hop progress.
    """
    intensity: float
    map_p: float
    alpha: float
    rate: float
    diversity: int = 1
    scheme: Scheme = Scheme.NC
    window_radius: Optional[float] = None
    seed: int = 0
    retry_cap: int = 10
    selection: Selection = Selection.ARGMAX
    contention_bits: int = 10
    contention_d_max: Optional[float] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        object.__setattr__(self, "selection", Selection(self.selection))
        if self.window_radius is None and self.intensity > 0:
            object.__setattr__(self, "window_radius", DEFAULT_WINDOW_SCALE / math.sqrt(self.intensity))
        self.validate()

    def validate(self) -> None:
        """Check every field against its validity domain.

        Raises:
            ConfigurationError: On the first field that is out of range; the
                message names the field and the violated bound.
        """
        if not self.intensity > 0:
            raise ConfigurationError(f"intensity must be > 0, got {self.intensity}", field="intensity")
        if not 0 < self.map_p < 1:
            raise ConfigurationError(f"map_p must lie in (0, 1), got {self.map_p}", field="map_p")
        if not self.alpha > 2:
            raise ConfigurationError(f"alpha must be > 2, got {self.alpha}", field="alpha")
        if not self.rate > 0:
            raise ConfigurationError(f"rate must be > 0, got {self.rate}", field="rate")
        if int(self.diversity) != self.diversity or self.diversity < 1:
            raise ConfigurationError(f"diversity must be a positive integer, got {self.diversity}", field="diversity")
        if self.window_radius is None or not self.window_radius > 0:
            raise ConfigurationError(f"window_radius must be > 0, got {self.window_radius}", field="window_radius")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigurationError(f"seed must be a 64-bit unsigned integer, got {self.seed}", field="seed")
        if self.retry_cap < 0:
            raise ConfigurationError(f"retry_cap must be >= 0, got {self.retry_cap}", field="retry_cap")
        if self.contention_bits < 1:
            raise ConfigurationError(f"contention_bits must be >= 1, got {self.contention_bits}", field="contention_bits")
        if self.contention_d_max is not None and not self.contention_d_max > 0:
            raise ConfigurationError(f"contention_d_max must be > 0, got {self.contention_d_max}", field="contention_d_max")

    @property
    def delta(self) -> float:
        """δ = 2/α."""
        return 2.0 / self.alpha

    @property
    def expected_nodes(self) -> float:
        """Mean number of PPP points in the window."""
        return self.intensity * math.pi * self.window_radius ** 2

    def with_changes(self, **changes: Any) -> "NetworkConfig":
        """Return a validated copy with some fields replaced."""
        return replace(self, **changes)

    def for_scheme(self, scheme: Scheme) -> "NetworkConfig":
        """Return a copy running ``scheme``; NC always runs with M = 1."""
        scheme = Scheme(scheme)
        diversity = 1 if scheme is Scheme.NC else self.diversity
        return replace(self, scheme=scheme, diversity=diversity)


def _empty_points() -> np.ndarray:
    return np.empty((0, 2), dtype=float)


@dataclass(frozen=True, eq=False)
class NetworkRealization:
    """Fixed node coordinates of one episode.

    Attributes:
        points: ``(N, 2)`` node coordinates, the source included.
        source_index: Index of the source, located exactly at the origin.
        probes: ``(P, 2)`` listen-only positions. They never transmit and never
            keep a ledger; they exist to measure link quality at chosen spots.
    """
    points: np.ndarray
    source_index: int
    probes: np.ndarray = field(default_factory=_empty_points)

    @property
    def n_nodes(self) -> int:
        return int(self.points.shape[0])

    @cached_property
    def progress(self) -> np.ndarray:
        """Progress |X|cos θ(X) of every node along the positive x-axis."""
        return self.points[:, 0].copy()

    @cached_property
    def receivers(self) -> np.ndarray:
        """Coordinates of all receiver positions: nodes first, then probes."""
        return np.vstack([self.points, self.probes])

    def with_probes(self, probes: Sequence[Sequence[float]]) -> "NetworkRealization":
        """Return the same node field with a new set of listen-only probes."""
        probes_array = np.asarray(probes, dtype=float).reshape(-1, 2)
        return NetworkRealization(points=self.points, source_index=self.source_index, probes=probes_array)


@dataclass(frozen=True, eq=False)
class SlotState:
    """ALOHA partition and fading of one slot.

    Attributes:
        transmit: Boolean role per node, ``True`` for Transmit.
        forced_tx: The current forwarding node; always transmitting.
        listeners: Ascending receiver indices (nodes in Receive role and
            probes) for which fading towards every transmitter was drawn.
        fading: ``(len(transmitters), len(listeners))`` power gains |h|².
    """
    transmit: np.ndarray
    forced_tx: int
    listeners: np.ndarray
    fading: np.ndarray

    @cached_property
    def transmitters(self) -> np.ndarray:
        """Ascending indices of the nodes in Transmit role."""
        return np.flatnonzero(self.transmit)

    def role(self, node: int) -> Role:
        return Role.TRANSMIT if self.transmit[node] else Role.RECEIVE

    def row_of(self, tx: int) -> int:
        """Row of ``fading`` that belongs to transmitter ``tx``.

        Raises:
            ContractViolation: If ``tx`` is not transmitting in this slot.
        """
        row = int(np.searchsorted(self.transmitters, tx))
        if row >= self.transmitters.size or self.transmitters[row] != tx:
            raise ContractViolation(f"node {tx} is not in Transmit role in this slot")
        return row

    def column_of(self, rx: int) -> int:
        """Column of ``fading`` that belongs to receiver ``rx``.

        Raises:
            ContractViolation: If no fading was drawn towards ``rx``.
        """
        column = int(np.searchsorted(self.listeners, rx))
        if column >= self.listeners.size or self.listeners[column] != rx:
            raise ContractViolation(f"receiver {rx} is not listening in this slot")
        return column

    def gain(self, tx: int, rx: int) -> float:
        """Power gain |h|² of the (tx, rx) pair."""
        return float(self.fading[self.row_of(tx), self.column_of(rx)])


def sample_network(
    config: NetworkConfig,
    rng: np.random.Generator,
    probes: Optional[Sequence[Sequence[float]]] = None,
) -> NetworkRealization:
    """Draw a PPP node field in the window and append the source at the origin.

    The node count is Poisson with mean λπr²; positions are uniform in the
    disc of radius ``config.window_radius``.

    Args:
        config: The operating point.
        rng: Random stream of the episode.
        probes: Optional listen-only positions attached to the realization.

    Returns:
        The realization; the source is the last point.

    Raises:
        ConfigurationError: If the window is expected to hold fewer than
            ``MIN_EXPECTED_NODES`` nodes.
    """
    expected = config.expected_nodes
    if expected < MIN_EXPECTED_NODES:
        raise ConfigurationError(
            f"window_radius={config.window_radius:g} holds only {expected:.3g} nodes on average "
            f"at intensity {config.intensity:g}; at least {MIN_EXPECTED_NODES} are required",
            field="window_radius",
        )

    count = int(rng.poisson(expected))
    radius = config.window_radius * np.sqrt(rng.random(count))
    angle = 2.0 * np.pi * rng.random(count)

    points = np.zeros((count + 1, 2), dtype=float)
    points[:count, 0] = radius * np.cos(angle)
    points[:count, 1] = radius * np.sin(angle)

    probe_array = _empty_points() if probes is None else np.asarray(probes, dtype=float).reshape(-1, 2)
    return NetworkRealization(points=points, source_index=count, probes=probe_array)


def draw_slot(
    real: NetworkRealization,
    config: NetworkConfig,
    forced_tx: int,
    rng: np.random.Generator,
    listeners: Optional[np.ndarray] = None,
) -> SlotState:
    """Sample the ALOHA roles and fading of a fresh slot.

    Every node transmits independently with probability ``map_p``; the
    forwarding node ``forced_tx`` always transmits. Fading gains are unit-mean
    exponential, drawn for every transmitter towards every listener.

    Args:
        real: The node field.
        config: The operating point (only ``map_p`` is used).
        forced_tx: Node that must transmit in this slot.
        rng: Random stream of the episode.
        listeners: Receiver indices that need fading. Nodes that end up in
            Transmit role are dropped from it. ``None`` means every
            Receive-role node and every probe.

    Returns:
        The slot state.

    Raises:
        ContractViolation: If ``forced_tx`` is not a node index.
    """
    n_nodes = real.n_nodes
    if not 0 <= forced_tx < n_nodes:
        raise ContractViolation(f"forced_tx={forced_tx} is not a node index (0..{n_nodes - 1})")

    transmit = rng.random(n_nodes) < config.map_p
    transmit[forced_tx] = True

    n_receivers = n_nodes + real.probes.shape[0]
    if listeners is None:
        listening = np.concatenate([np.flatnonzero(~transmit), np.arange(n_nodes, n_receivers)])
    else:
        candidates = np.unique(np.asarray(listeners, dtype=np.intp))
        is_probe = candidates >= n_nodes
        node_part = np.where(is_probe, 0, candidates)
        listening = candidates[is_probe | ~transmit[node_part]]

    fading = rng.exponential(1.0, size=(int(transmit.sum()), listening.size))
    return SlotState(transmit=transmit, forced_tx=forced_tx, listeners=listening, fading=fading)
