"""P-bit pulse contention among decoded relays.

Each contender maps its progress to a P-bit code. Bits are processed from the
most significant one down: a relay with bit 1 pulses, a relay with bit 0
listens and quits as soon as it hears a pulse. Whoever is left after P units
holds the largest code.
"""
import logging
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence

import numpy as np

from core.exceptions import ConfigurationError, ContractViolation

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ContentionConfig:
    """Quantizer of the contention phase.

    Attributes:
        bits: Number of contention time units P.
        d_max: Progress mapped to the all-ones code.
    """
    bits: int
    d_max: float

    def __post_init__(self) -> None:
        if int(self.bits) != self.bits or self.bits < 1:
            raise ConfigurationError(f"contention bits must be a positive integer, got {self.bits}")
        if not self.d_max > 0:
            raise ConfigurationError(f"contention d_max must be > 0, got {self.d_max}")

    @property
    def top_code(self) -> int:
        return 2 ** self.bits - 1

    @property
    def resolution(self) -> float:
        """Progress width of one code step."""
        return self.d_max / self.top_code


@dataclass
class Contender:
    node: int
    progress: float
    code: int
    active: bool = True


@dataclass(frozen=True)
class ContentionOutcome:
    """Result of one contention period.

    Attributes:
        winner: Selected node index, ``None`` for an empty contender list.
        survivors: Relays still active after the last unit; above 1 means
            identical codes collided.
        slots_used: Contention time units elapsed (always P).
    """
    winner: Optional[int]
    survivors: int
    slots_used: int

    @property
    def collided(self) -> bool:
        return self.survivors > 1


def encode_progress(progress: float, cfg: ContentionConfig) -> int:
    """Quantize ``progress`` linearly over [0, d_max] to a P-bit integer.

    Raises:
        ContractViolation: If ``progress`` is not positive.
    """
    if not progress > 0:
        raise ContractViolation(f"only positive progress contends, got {progress}")
    code = int(np.floor(progress / cfg.d_max * cfg.top_code))
    return min(max(code, 0), cfg.top_code)


def code_bits(code: int, bits: int) -> str:
    """Bit vector of ``code`` read MSB to LSB, e.g. ``code_bits(6, 6) == '000110'``."""
    if not 0 <= code < 2 ** bits:
        raise ContractViolation(f"code {code} does not fit in {bits} bits")
    return format(code, f"0{bits}b")


def make_contenders(nodes: Iterable[int], progress: Sequence[float], cfg: ContentionConfig) -> List[Contender]:
    """Build active contenders for ``nodes`` whose progress is ``progress[node]``."""
    return [Contender(node=int(node), progress=float(progress[node]), code=encode_progress(float(progress[node]), cfg))
            for node in nodes]


def run_contention(contenders: Sequence[Contender], cfg: ContentionConfig) -> ContentionOutcome:
    """Run the P time units of pulse contention.

    Contenders that hear a pulse while listening are marked inactive in place.

    Args:
        contenders: Active contenders with codes in ``[0, 2^P - 1]``.
        cfg: The quantizer whose ``bits`` fixes the number of time units.

    Returns:
        The outcome; among identical surviving codes the lowest node index wins.
    """
    for contender in contenders:
        if not contender.active:
            raise ContractViolation(f"contender {contender.node} entered the contention inactive")
        if not 0 <= contender.code <= cfg.top_code:
            raise ContractViolation(f"contender {contender.node} has code {contender.code} outside P={cfg.bits} bits")

    for position in range(cfg.bits - 1, -1, -1):
        active = [c for c in contenders if c.active]
        pulsing = [c for c in active if (c.code >> position) & 1]
        if not pulsing:
            continue
        for contender in active:
            if not (contender.code >> position) & 1:
                contender.active = False

    survivors = [c for c in contenders if c.active]
    if not survivors:
        return ContentionOutcome(winner=None, survivors=0, slots_used=cfg.bits)

    winner = min(survivors, key=lambda c: c.node)
    if len(survivors) > 1:
        logger.debug(f"Contention collision: {len(survivors)} relays share code {winner.code}")
    return ContentionOutcome(winner=winner.node, survivors=len(survivors), slots_used=cfg.bits)
