from pathlib import Path
from typing import Any, Optional

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError, CommandParser

from apps.auditing.signals import event_logged
from apps.cli.runner import ExperimentRunner, RunSummary
from apps.cli.specs import MAX_SEED, RunSpec
from core.exceptions import ConfigurationError, PrdLabError, SpecValidationError

EXIT_VALIDATION = 1
EXIT_RUNTIME = 2


def seed_argument(value: str) -> int:
    seed = int(value)
    if not 0 <= seed <= MAX_SEED:
        raise ValueError(seed)
    return seed


def positive_float(value: str) -> float:
    number = float(value)
    if not number > 0:
        raise ValueError(number)
    return number


class ExperimentCommand(BaseCommand):
    """
    Base of the commands that run a spec: shared options and exit codes.

    Exit code 1 means the spec file was rejected, 2 that the run itself failed.
    """

    def add_arguments(self, parser: CommandParser) -> None:
        parser.add_argument("--seed", type=seed_argument, help="Master seed; overrides every seed in the spec file.")
        parser.add_argument("--workers", type=int, help="Worker processes (PRD_WORKERS overrides it).")
        parser.add_argument("--out-dir", default="results", help="Directory receiving the CSV files.")
        parser.add_argument("--trials-scale", type=positive_float, default=1.0,
                            help="Multiplier of every trial count (e.g. 0.1 for a quick run).")
        parser.add_argument("--no-record", action="store_true", help="Do not store the run in the database.")

    def resolve_workers(self, requested: Optional[int]) -> Optional[int]:
        workers = settings.PRD_WORKERS or requested
        if workers is not None and workers < 1:
            raise CommandError(f"--workers must be >= 1, got {workers}", returncode=EXIT_VALIDATION)
        return workers

    def reject(self, error: SpecValidationError, source: str) -> CommandError:
        """Report a rejected spec and build the matching CommandError."""
        for line in error.render().splitlines():
            self.stderr.write(f"{source}: {line}")
        event_logged.send(
            sender=self.__class__,
            event_identifier="SPEC_REJECTED",
            details={"source": source, "problems": [list(problem) for problem in error.problems]},
        )
        return CommandError(f"{source}: {len(error.problems)} problem(s) in the spec file", returncode=EXIT_VALIDATION)

    def execute_spec(self, spec: RunSpec, /, **options: Any) -> RunSummary:
        """Run ``spec`` with the command-line overrides and print the gains table."""
        out_dir = Path(options["out_dir"]) / spec.name
        runner = ExperimentRunner(
            spec,
            out_dir=out_dir,
            seed=options.get("seed"),
            workers=self.resolve_workers(options.get("workers")),
            trials_scale=options.get("trials_scale") or 1.0,
            record=not options.get("no_record"),
        )
        try:
            summary = runner.run_all()
        except KeyboardInterrupt:
            raise CommandError(f"Interrupted; partial results kept in {out_dir}", returncode=EXIT_RUNTIME)
        except ConfigurationError as e:
            raise CommandError(str(e), returncode=EXIT_VALIDATION)
        except PrdLabError as e:
            raise CommandError(str(e), returncode=EXIT_RUNTIME)

        for path in summary.paths:
            self.stdout.write(f"wrote {path}")
        for line in summary.table():
            self.stdout.write(line)
        self.stdout.write(self.style.SUCCESS(f"Run '{spec.name}' finished ({len(summary.paths)} file(s))."))
        return summary
