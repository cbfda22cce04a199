"""Interference-limited link quality: SIR, mutual information and combining."""
from typing import Iterable, Optional, Union

import numpy as np
from scipy.spatial.distance import cdist

from core.exceptions import ContractViolation

from .network import DISTANCE_FLOOR, NetworkRealization, Scheme, SlotState

ArrayOrFloat = Union[float, np.ndarray]


def sir_field(slot: SlotState, real: NetworkRealization, alpha: float, tx: int) -> np.ndarray:
    """SIR from ``tx`` at every listener of the slot.

    Transmit power is 1 and noise is zero, so the SIR is the desired faded
    power over the summed faded power of every other transmitter. A listener
    with no interferer gets ``+inf``.

    Args:
        slot: The slot state; ``tx`` must be transmitting in it.
        real: The node field the slot was drawn on.
        alpha: Path-loss exponent.
        tx: Index of the desired transmitter.

    Returns:
        One SIR per entry of ``slot.listeners``.
    """
    row = slot.row_of(tx)
    rx_xy = real.receivers[slot.listeners]
    tx_xy = real.points[slot.transmitters]

    squared = cdist(rx_xy, tx_xy, "sqeuclidean")
    np.maximum(squared, DISTANCE_FLOOR ** 2, out=squared)
    power = slot.fading.T * squared ** (-alpha / 2.0)

    signal = power[:, row].copy()
    power[:, row] = 0.0
    interference = power.sum(axis=1)

    sir = np.full_like(signal, np.inf)
    np.divide(signal, interference, out=sir, where=interference > 0.0)
    return sir


def compute_sir(rx: int, tx: int, slot: SlotState, real: NetworkRealization, alpha: float) -> float:
    """SIR from transmitter ``tx`` at receiver ``rx``.

    Args:
        rx: Receiver index (a node index, or ``n_nodes + k`` for probe k).
        tx: Transmitting node.
        slot: The slot state.
        real: The node field.
        alpha: Path-loss exponent.

    Returns:
        The SIR, ``inf`` when nobody else transmits.

    Raises:
        ContractViolation: If ``rx`` is the transmitter itself, is not
            listening, or ``tx`` is not transmitting.
    """
    if rx == tx:
        raise ContractViolation(f"receiver {rx} coincides with the transmitter")
    column = slot.column_of(rx)
    row = slot.row_of(tx)

    tx_xy = real.points[slot.transmitters]
    squared = np.sum((tx_xy - real.receivers[rx]) ** 2, axis=1)
    np.maximum(squared, DISTANCE_FLOOR ** 2, out=squared)
    power = slot.fading[:, column] * squared ** (-alpha / 2.0)

    signal = power[row]
    interference = float(np.delete(power, row).sum())
    if interference <= 0.0:
        return float("inf")
    return float(signal / interference)


def mutual_information(sir: ArrayOrFloat) -> ArrayOrFloat:
    """log2(1 + SIR) in bits; ``inf`` maps to ``inf``."""
    values = np.asarray(sir, dtype=float)
    if np.any(values < 0):
        raise ContractViolation("SIR must be non-negative")
    bits = np.log2(1.0 + values)
    return float(bits) if bits.ndim == 0 else bits


def block_contribution(sir: ArrayOrFloat, scheme: Scheme) -> ArrayOrFloat:
    """What a receiver stores for one heard block: MI for IRC, SIR otherwise."""
    return mutual_information(sir) if Scheme(scheme) is Scheme.IRC else sir


def _combined_decodes(total: ArrayOrFloat, scheme: Scheme, rate: float) -> Union[bool, np.ndarray]:
    if scheme is Scheme.IRC:
        return np.asarray(total) >= rate
    with np.errstate(over="ignore"):
        return np.log2(1.0 + np.asarray(total)) >= rate


def accumulate_metric(
    contributions: Iterable[float],
    scheme: Scheme,
    rate: float,
    diversity: Optional[int] = None,
) -> bool:
    """Decide whether a receiver decodes from its stored block contributions.

    IRC adds mutual information, RC adds SIRs before taking log2(1 + ·), NC
    uses its single SIR. The boundary is inclusive.

    Args:
        contributions: One value per distinct block index heard.
        scheme: Combining scheme.
        rate: Code rate R.
        diversity: Diversity order M; NC always uses 1.

    Returns:
        ``True`` if the packet decodes.

    Raises:
        ContractViolation: If there are more contributions than blocks.
    """
    scheme = Scheme(scheme)
    values = np.fromiter(contributions, dtype=float)
    limit = 1 if scheme is Scheme.NC else diversity
    if limit is None:
        raise ContractViolation(f"diversity is required for {scheme.value}")
    if values.size > limit:
        raise ContractViolation(f"{values.size} contributions for at most {limit} blocks")
    return bool(_combined_decodes(values.sum(), scheme, rate))


def decode_mask(blocks: np.ndarray, scheme: Scheme, rate: float) -> np.ndarray:
    """Vectorized ``accumulate_metric`` over a ``(nodes, M)`` block table.

    Blocks never heard hold 0, which adds nothing under either combining rule.
    """
    return _combined_decodes(blocks.sum(axis=1), Scheme(scheme), rate)
