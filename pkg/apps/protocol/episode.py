"""One M-hop cooperative relaying episode from the source at the origin."""
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Set

import numpy as np

from apps.analytic.params import AnalyticParams
from apps.analytic.recursion import one_hop_progress
from apps.contention.pulses import ContentionConfig, make_contenders, run_contention
from apps.netmodel.channel import block_contribution, sir_field
from apps.netmodel.network import NetworkConfig, NetworkRealization, Scheme, Selection, draw_slot
from core.exceptions import ContractViolation

from .ledger import NodeLedger, block_index, select_relay

logger = logging.getLogger(__name__)

# Default contention range in multiples of the analytic one-hop progress.
CONTENTION_RANGE_FACTOR = 3.0


@dataclass
class EpisodeResult:
    """Outcome of one episode.

    Attributes:
        progress: D_1 … D_M, nondecreasing and nonnegative.
        relays: Forwarding relays in the order they were selected.
        retransmissions: Extra slots spent per hop because nobody qualified.
        failed: The retry cap ran out; later D values are frozen.
        collisions: Contention rounds that ended with several equal codes.
        mismatches: Contention rounds whose winner differs from the exact argmax.
        contention_rounds: Contention rounds held.
    """
    progress: np.ndarray
    relays: List[int] = field(default_factory=list)
    retransmissions: List[int] = field(default_factory=list)
    failed: bool = False
    collisions: int = 0
    mismatches: int = 0
    contention_rounds: int = 0


def contention_config_for(config: NetworkConfig) -> ContentionConfig:
    """Quantizer of ``config``; d_max defaults to three analytic one-hop progresses."""
    d_max = config.contention_d_max
    if d_max is None:
        params = AnalyticParams(intensity=config.intensity, map_p=config.map_p, alpha=config.alpha, rate=config.rate)
        d_max = CONTENTION_RANGE_FACTOR * one_hop_progress(params)
    return ContentionConfig(bits=config.contention_bits, d_max=d_max)


class _RelaySelector:
    """Applies the configured selection rule and counts contention statistics."""

    def __init__(self, config: NetworkConfig, result: EpisodeResult) -> None:
        self.result = result
        self.contention = contention_config_for(config) if config.selection is Selection.CONTENTION else None

    def __call__(self, ledger: NodeLedger, excluded: Set[int]) -> Optional[int]:
        exact = select_relay(ledger, excluded)
        if self.contention is None or exact is None:
            return exact

        contenders = make_contenders(ledger.candidates(excluded), ledger.progress, self.contention)
        outcome = run_contention(contenders, self.contention)
        self.result.contention_rounds += 1
        if outcome.collided:
            self.result.collisions += 1
        if outcome.winner != exact:
            self.result.mismatches += 1
        return outcome.winner


def run_episode(config: NetworkConfig, real: NetworkRealization, rng: np.random.Generator) -> EpisodeResult:
    """Relay a packet over M hops, one fresh slot per transmission.

    The current forwarding node sends its block; every listener stores the
    block's contribution and re-checks its decode condition; D_h is the
    largest progress among decoders. When nobody qualifies as next relay the
    same block is retransmitted in a new slot, at most ``retry_cap`` times;
    after that the remaining D values are frozen and the episode is marked
    failed.

    Only nodes with positive progress listen: the others can neither raise
    D nor be selected.

    Raises:
        ContractViolation: If NC is requested with M != 1.
    """
    if config.scheme is Scheme.NC and config.diversity != 1:
        raise ContractViolation(f"NC runs with M = 1, got M = {config.diversity}")

    diversity = config.diversity
    ledger = NodeLedger.empty(real, diversity, config.scheme, config.rate)
    forward = np.flatnonzero(real.progress > 0)

    result = EpisodeResult(progress=np.zeros(diversity, dtype=float))
    select = _RelaySelector(config, result)
    excluded: Set[int] = {real.source_index}
    current = real.source_index
    reached = 0.0

    for hop in range(1, diversity + 1):
        block = block_index(hop - 1, diversity)
        relay = None
        attempts = 0
        while True:
            slot = draw_slot(real, config, current, rng, listeners=forward)
            if slot.listeners.size:
                sir = sir_field(slot, real, config.alpha, current)
                ledger.receive(block, slot.listeners, block_contribution(sir, config.scheme))
                ledger.refresh(slot.listeners)
            relay = select(ledger, excluded)
            if relay is not None or attempts >= config.retry_cap:
                break
            attempts += 1

        result.retransmissions.append(attempts)
        if relay is None:
            result.failed = True
            result.progress[hop - 1:] = reached
            logger.debug(f"Episode failed at hop {hop} after {attempts} retransmissions")
            break

        reached = ledger.reached_progress()
        result.progress[hop - 1] = reached
        result.relays.append(relay)
        excluded.add(relay)
        current = relay

    return result
