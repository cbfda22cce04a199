import json
from typing import Any

from django.core.management.base import BaseCommand, CommandError, CommandParser

from apps.analytic.params import AnalyticParams, IntegrationSettings
from apps.analytic.recursion import analytic_prd, expected_progress_approx
from apps.analytic.serializers import AnalyticQuerySerializer
from apps.cli.management.base import EXIT_RUNTIME, EXIT_VALIDATION
from apps.cli.runner import RunDefaults
from apps.netmodel.network import Scheme
from core.exceptions import ConfigurationError, DomainError, IntegrationError


class Command(BaseCommand):
    """Print d̃_1 … d̃_M, the cell areas and the analytic PRD of one operating point."""
    help = "Computes the analytic progress table of one operating point."

    def add_arguments(self, parser: CommandParser) -> None:
        parser.add_argument("--intensity", type=float, default=1.0)
        parser.add_argument("--map-p", type=float, required=True)
        parser.add_argument("--alpha", type=float, required=True)
        parser.add_argument("--rate", type=float, required=True)
        parser.add_argument("--diversity", type=int, default=1)
        parser.add_argument("--scheme", choices=[s.value for s in Scheme], default=Scheme.IRC.value)
        parser.add_argument("--samples", type=int, help="Integrator samples per grid point.")
        parser.add_argument("--json", action="store_true", help="Print JSON instead of a table.")

    def handle(self, *args: Any, **options: Any) -> None:
        """
        Validate the operating point and print its table.

        Raises:
            CommandError: Return code 1 for parameters out of domain, 2 when
                the integration does not converge.
        """
        query = AnalyticQuerySerializer(data={
            key: options[key] for key in ("intensity", "map_p", "alpha", "rate", "diversity", "scheme")
        })
        if not query.is_valid():
            for field, messages in query.errors.items():
                for message in messages:
                    self.stderr.write(f"{field}: {message}")
            raise CommandError("Invalid operating point", returncode=EXIT_VALIDATION)

        defaults = RunDefaults.load()
        try:
            integration = IntegrationSettings(
                samples=options["samples"] or defaults.integration_samples,
                tail_tolerance=defaults.tail_tolerance,
            )
            params = AnalyticParams(**query.validated_data, integration=integration)
            table = expected_progress_approx(params)
            prd = analytic_prd(params)
        except (ConfigurationError, DomainError) as e:
            raise CommandError(str(e), returncode=EXIT_VALIDATION)
        except IntegrationError as e:
            raise CommandError(str(e), returncode=EXIT_RUNTIME)

        if options["json"]:
            self.stdout.write(json.dumps({**query.validated_data, "rows": list(table.as_rows()), "prd": prd}, indent=2))
            return
        self.stdout.write(f"{'m':>3}  {'d_tilde':>12}  {'cell_area':>12}  {'c':>12}")
        for row in table.as_rows():
            self.stdout.write(f"{row['m']:>3}  {row['d_tilde']:>12.6g}  {row['cell_area']:>12.6g}  {row['c']:>12.6g}")
        self.stdout.write(f"PRD = {prd:.6g}")
