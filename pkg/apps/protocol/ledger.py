from dataclasses import dataclass
from typing import AbstractSet, Dict, Optional

import numpy as np

from apps.netmodel.channel import decode_mask
from apps.netmodel.network import NetworkRealization, Scheme
from core.exceptions import ContractViolation


def block_index(hop: int, diversity: int) -> int:
    """Codeword block sent by forwarding relay ``hop`` (0 is the source).

    Relay i sends block q(i) + 1 with q(i) = i mod M.
    """
    if hop < 0:
        raise ContractViolation(f"hop index must be >= 0, got {hop}")
    if diversity < 1:
        raise ContractViolation(f"diversity must be >= 1, got {diversity}")
    return hop % diversity + 1


@dataclass(eq=False)
class NodeLedger:
    """Sticky reception record of every node during one episode.

    Attributes:
        blocks: ``(N, M)`` best contribution heard per block index (MI for
            IRC, SIR for RC/NC); 0 for blocks never heard.
        decoded: Sticky decode flag per node.
        progress: |X|cos θ(X) per node.
        scheme: Combining scheme.
        rate: Code rate R.
    """
    blocks: np.ndarray
    decoded: np.ndarray
    progress: np.ndarray
    scheme: Scheme
    rate: float

    @classmethod
    def empty(cls, real: NetworkRealization, diversity: int, scheme: Scheme, rate: float) -> "NodeLedger":
        n_nodes = real.n_nodes
        return cls(
            blocks=np.zeros((n_nodes, diversity), dtype=float),
            decoded=np.zeros(n_nodes, dtype=bool),
            progress=real.progress,
            scheme=Scheme(scheme),
            rate=rate,
        )

    @property
    def diversity(self) -> int:
        return int(self.blocks.shape[1])

    def receive(self, block: int, nodes: np.ndarray, contributions: np.ndarray) -> None:
        """Store one heard block for each listening node.

        Hearing a block index twice keeps the larger single contribution; the
        same parity symbols carry no new information.
        """
        if not 1 <= block <= self.diversity:
            raise ContractViolation(f"block {block} outside 1..{self.diversity}")
        column = block - 1
        self.blocks[nodes, column] = np.maximum(self.blocks[nodes, column], contributions)

    def refresh(self, nodes: Optional[np.ndarray] = None) -> None:
        """Re-evaluate the decode condition; decoded flags never revert."""
        if nodes is None:
            self.decoded |= decode_mask(self.blocks, self.scheme, self.rate)
            return
        self.decoded[nodes] |= decode_mask(self.blocks[nodes], self.scheme, self.rate)

    def candidates(self, excluded: AbstractSet[int]) -> np.ndarray:
        """Ascending indices of decoders with positive progress not in ``excluded``."""
        eligible = self.decoded & (self.progress > 0)
        if excluded:
            eligible[np.fromiter(excluded, dtype=np.intp)] = False
        return np.flatnonzero(eligible)

    def reached_progress(self) -> float:
        """max(0, largest progress among decoded nodes)."""
        if not self.decoded.any():
            return 0.0
        return max(0.0, float(self.progress[self.decoded].max()))

    def blocks_of(self, node: int) -> Dict[int, float]:
        """Heard blocks of ``node`` as ``{block index: contribution}``."""
        row = self.blocks[node]
        return {column + 1: float(value) for column, value in enumerate(row) if value > 0}


def select_relay(ledger: NodeLedger, excluded: AbstractSet[int]) -> Optional[int]:
    """Pick the decoder offering the most progress.

    Only decoded nodes with positive progress outside ``excluded`` qualify;
    equal progress goes to the lowest node index.

    Returns:
        The node index, or ``None`` when nobody qualifies.
    """
    candidates = ledger.candidates(excluded)
    if candidates.size == 0:
        return None
    return int(candidates[np.argmax(ledger.progress[candidates])])
