from pathlib import Path
from typing import Any

from django.core.management.base import CommandParser

from apps.cli.management.base import ExperimentCommand
from apps.cli.specs import load_spec
from core.exceptions import SpecValidationError

SUITES_DIR = Path(__file__).resolve().parents[2] / "suites"
SUITES = sorted(path.stem for path in SUITES_DIR.glob("*.yaml"))


class Command(ExperimentCommand):
    """Run one of the built-in experiment suites."""
    help = "Runs a built-in experiment suite (PRD vs p, optimal R vs M, maximal PRD vs alpha and vs M)."

    def add_arguments(self, parser: CommandParser) -> None:
        parser.add_argument("name", choices=SUITES, help="Suite to run.")
        super().add_arguments(parser)

    def handle(self, *args: Any, **options: Any) -> None:
        path = SUITES_DIR / f"{options['name']}.yaml"
        try:
            spec = load_spec(path)
        except SpecValidationError as e:
            raise self.reject(e, str(path))
        self.execute_spec(spec, **options)
