import hashlib
import json
import math
from dataclasses import asdict, dataclass, field, replace
from typing import Any, Optional

from apps.netmodel.network import NetworkConfig, Scheme
from core.exceptions import ConfigurationError, DomainError


@dataclass(frozen=True)
class IntegrationSettings:
    """Controls of the decoding-cell integrator.

    Lengths are expressed in units of L = 1/sqrt(λpG(α)(2^R - 1)^δ), the
    natural scale of the one-slot decoding cell.

    Attributes:
        radial_step: Ring width of the polar grid, in units of L.
        angular_step: Angular width of a grid sector (radians).
        samples: Monte Carlo samples per grid point; rounded up to a power
            of two for the Sobol bank.
        tail_tolerance: Stop once a ring adds less than this fraction of the
            accumulated area.
        radial_extent: Largest radius examined beyond the transmitters, in
            units of L, before the integration is declared divergent.
        seed: Scrambling seed of the Sobol bank.
    """
    radial_step: float = 0.05
    angular_step: float = math.pi / 90
    samples: int = 10_000
    tail_tolerance: float = 1e-3
    radial_extent: float = 30.0
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.radial_step > 0:
            raise ConfigurationError(f"radial_step must be > 0, got {self.radial_step}")
        if not 0 < self.angular_step <= math.pi:
            raise ConfigurationError(f"angular_step must lie in (0, pi], got {self.angular_step}")
        if self.samples < 16:
            raise ConfigurationError(f"samples must be >= 16, got {self.samples}")
        if not 0 < self.tail_tolerance < 1:
            raise ConfigurationError(f"tail_tolerance must lie in (0, 1), got {self.tail_tolerance}")
        if not self.radial_extent > 1:
            raise ConfigurationError(f"radial_extent must be > 1, got {self.radial_extent}")


@dataclass(frozen=True)
class AnalyticParams:
    """Operating point of the analytic approximation.

    Attributes:
        intensity: Node intensity λ.
        map_p: Medium-access probability p.
        alpha: Path-loss exponent.
        rate: Code rate R.
        diversity: Diversity order M.
        scheme: IRC or RC; NC is accepted with M = 1 and behaves like both.
        integration: Integrator controls.

    Raises:
        DomainError: For ``alpha`` <= 2 or ``rate`` <= 0.
        ConfigurationError: For any other field out of range.
    """
    intensity: float
    map_p: float
    alpha: float
    rate: float
    diversity: int = 1
    scheme: Scheme = Scheme.IRC
    integration: IntegrationSettings = field(default_factory=IntegrationSettings)

    def __post_init__(self) -> None:
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        if not self.intensity > 0:
            raise ConfigurationError(f"intensity must be > 0, got {self.intensity}")
        if not 0 < self.map_p < 1:
            raise ConfigurationError(f"map_p must lie in (0, 1), got {self.map_p}")
        if not self.alpha > 2:
            raise DomainError(f"alpha must be > 2, got {self.alpha}")
        if not self.rate > 0:
            raise DomainError(f"rate must be > 0, got {self.rate}")
        if int(self.diversity) != self.diversity or self.diversity < 1:
            raise ConfigurationError(f"diversity must be a positive integer, got {self.diversity}")
        if self.scheme is Scheme.NC and self.diversity != 1:
            raise ConfigurationError(f"NC has diversity 1, got {self.diversity}")

    @property
    def delta(self) -> float:
        return 2.0 / self.alpha

    @property
    def threshold(self) -> float:
        """SIR threshold 2^R - 1."""
        return math.expm1(self.rate * math.log(2.0))

    def with_changes(self, **changes: Any) -> "AnalyticParams":
        return replace(self, **changes)

    def cache_key(self, prefix: str = "analytic") -> str:
        payload = asdict(self)
        payload["scheme"] = self.scheme.value
        digest = hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()
        return f"{prefix}:{digest}"

    @classmethod
    def from_network(cls, config: NetworkConfig, integration: Optional[IntegrationSettings] = None) -> "AnalyticParams":
        """Analytic counterpart of a simulated operating point."""
        return cls(
            intensity=config.intensity,
            map_p=config.map_p,
            alpha=config.alpha,
            rate=config.rate,
            diversity=config.diversity,
            scheme=config.scheme,
            integration=integration or IntegrationSettings(),
        )
