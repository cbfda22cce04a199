# File: apps/analytic/throttles.py
import re
from typing import Optional, Tuple

from rest_framework.request import Request
from rest_framework.throttling import SimpleRateThrottle
from rest_framework.views import APIView

from apps.experiments.models import SimulationDefaults


class AnalyticTableRateThrottle(SimpleRateThrottle):
    """
    A throttle whose period comes from SimulationDefaults.

    One table can take seconds to integrate, so each client IP gets at most
    one request per ``analytic_throttle_seconds``. The period can be changed
    from the Django admin without restarting the server.
    """

    scope = "analytic_table"

    def get_rate(self) -> Optional[str]:
        """
        Determine the throttle rate by fetching it from the database.

        Returns:
            A rate string such as "1/10s", or None if throttling is disabled
            (a period of 0).
        """
        try:
            timeout = SimulationDefaults.get_solo().analytic_throttle_seconds
        except SimulationDefaults.DoesNotExist:
            return None
        if timeout == 0:
            return None
        return f"1/{timeout}s"

    def parse_rate(self, rate: Optional[str]) -> Tuple[Optional[int], Optional[int]]:
        """
        Parse a rate string like "1/10s" into ``(requests, seconds)``.

        Unlike the stock parser, the period may carry a multiplier.

        Args:
            rate: The rate string to parse.

        Returns:
            A tuple of (number_of_requests, duration_in_seconds), or
            ``(None, None)`` if the rate is invalid or None.
        """
        if rate is None:
            return None, None
        try:
            num, period_str = rate.split('/')
            match = re.match(r"(\d+)([smhd])", period_str)
            if not match:
                raise ValueError("Invalid rate period format")
            value, unit = match.groups()
            multipliers = {'s': 1, 'm': 60, 'h': 3600, 'd': 86400}
            return int(num), int(value) * multipliers[unit]
        except (ValueError, KeyError):
            return None, None

    def get_cache_key(self, request: Request, view: APIView) -> Optional[str]:
        """
        Key the throttle history by client IP.

        Args:
            request: The current request object.
            view: The view being accessed.

        Returns:
            The cache key for this client.
        """
        return self.cache_format % {"scope": self.scope, "ident": self.get_ident(request)}
