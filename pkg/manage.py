#!/usr/bin/env python
# File: manage.py
"""PRD Lab command line: Django administration plus run_experiment, suite and analytic_table."""
import os
import sys


def main() -> None:
    """Dispatch to a management command.

    Raises:
        ImportError: If Django is not importable from the active environment.
    """
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'core.settings')
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError(
            "Couldn't import Django. Install requirements.txt into the active "
            "environment before running PRD Lab commands."
        ) from exc
    execute_from_command_line(sys.argv)


if __name__ == '__main__':
    main()
