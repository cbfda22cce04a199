from typing import Any, Dict, List, Optional, Tuple

from django.core.cache import cache
from rest_framework import status
from rest_framework.exceptions import Throttled
from rest_framework.response import Response
from rest_framework.views import exception_handler


class PrdLabError(Exception):
    """Base class for every error raised by the simulator and its tooling."""


class ConfigurationError(PrdLabError, ValueError):
    """A configuration object violates its validity domain.

    Attributes:
        field: Name of the offending field, when a single one is to blame.
    """

    def __init__(self, message: str, field: Optional[str] = None) -> None:
        super().__init__(message)
        self.field = field


class DomainError(PrdLabError, ValueError):
    """A closed form was evaluated outside its mathematical domain."""


class ContractViolation(PrdLabError):
    """A caller broke a documented precondition of an operation."""


class IntegrationError(PrdLabError, RuntimeError):
    """The cell-area integrator did not converge within its radial extent.

    Attributes:
        diagnostics: Numbers describing where the integration stopped
            (radius reached, last ring mass, accumulated mass, ...).
    """

    def __init__(self, message: str, diagnostics: Optional[Dict[str, float]] = None) -> None:
        super().__init__(message)
        self.diagnostics: Dict[str, float] = diagnostics or {}

    def __str__(self) -> str:
        base = super().__str__()
        if not self.diagnostics:
            return base
        details = ", ".join(f"{key}={value:.6g}" for key, value in self.diagnostics.items())
        return f"{base} ({details})"


class SpecValidationError(PrdLabError, ValueError):
    """An experiment spec was rejected.

    Attributes:
        problems: One ``(line, field, message)`` triple per problem. ``line`` is
            1-based and ``None`` when the problem cannot be tied to a line.
    """

    def __init__(self, problems: List[Tuple[Optional[int], str, str]]) -> None:
        self.problems = problems
        super().__init__(self.render())

    def render(self) -> str:
        """Format the problems one per line, ``line N: field: message``."""
        lines = []
        for line, field, message in self.problems:
            where = f"line {line}" if line is not None else "line ?"
            lines.append(f"{where}: {field}: {message}")
        return "\n".join(lines)


def custom_exception_handler(exc: Exception, context: Dict[str, Any]) -> Optional[Response]:
    """Handle exceptions for DRF views.

    Domain errors raised by the numerical code are turned into JSON error
    responses instead of 500 pages. Throttled requests are recorded as an
    'API_THROTTLED' audit event, at most once every 5 minutes per client IP.

    Args:
        exc: The exception instance that was raised.
        context: A dictionary containing context data, such as the view
            and the request.

    Returns:
        A DRF Response object if the exception is handled, or None otherwise.
    """
    if isinstance(exc, (ConfigurationError, DomainError, SpecValidationError)):
        return Response({"detail": str(exc)}, status=status.HTTP_400_BAD_REQUEST)
    if isinstance(exc, IntegrationError):
        return Response(
            {"detail": str(exc), "diagnostics": exc.diagnostics},
            status=status.HTTP_422_UNPROCESSABLE_ENTITY,
        )

    response = exception_handler(exc, context)

    if isinstance(exc, Throttled):
        from apps.auditing.signals import event_logged
        from apps.auditing.utils import get_client_ip

        request = context['request']
        ip_address = get_client_ip(request)

        cache_key = f"throttle_notification_sent_{ip_address}"
        if cache.get(cache_key):
            return response

        event_logged.send(
            sender='DRFThrottling',
            event_identifier='API_THROTTLED',
            details={
                "ip_address": ip_address,
                "user_agent": request.META.get('HTTP_USER_AGENT'),
                "path": request.path,
                "wait_seconds": exc.wait,
            }
        )
        cache.set(cache_key, True, timeout=300)

    return response
