from typing import Any

from django.core.management.base import CommandParser

from apps.cli.management.base import ExperimentCommand
from apps.cli.specs import load_spec
from core.exceptions import SpecValidationError


class Command(ExperimentCommand):
    """Run every experiment of a YAML spec file and write its CSV files."""
    help = "Runs the experiments of a spec file; one CSV per (experiment, scheme, objective)."

    def add_arguments(self, parser: CommandParser) -> None:
        parser.add_argument("spec", help="Path to the YAML spec.")
        super().add_arguments(parser)

    def handle(self, *args: Any, **options: Any) -> None:
        """
        Validate the spec file, then run it.

        Args:
            *args: Variable length argument list.
            **options: Parsed command-line options.

        Raises:
            CommandError: With return code 1 for a rejected spec and 2 for a
                failed or interrupted run.
        """
        try:
            spec = load_spec(options["spec"])
        except SpecValidationError as e:
            raise self.reject(e, options["spec"])
        self.execute_spec(spec, **options)
