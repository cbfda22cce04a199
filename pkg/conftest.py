"""Pytest wiring that mirrors core.test_runner.PrdLabTestRunner.

Tests tagged 'acceptance' (pytest-django exposes Django tags as marks) are
deselected unless RUN_ACCEPTANCE=1 or ``-m acceptance`` is given.
"""
from django.conf import settings


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: long-running headline PRD checks")


def pytest_collection_modifyitems(config, items):
    if settings.RUN_ACCEPTANCE or "acceptance" in (config.getoption("-m") or ""):
        return
    kept, deselected = [], []
    for item in items:
        (deselected if item.get_closest_marker("acceptance") else kept).append(item)
    if deselected:
        config.hook.pytest_deselected(items=deselected)
        items[:] = kept
