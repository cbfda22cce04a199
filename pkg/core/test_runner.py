from typing import Any

from django.conf import settings
from django.test.runner import DiscoverRunner


class PrdLabTestRunner(DiscoverRunner):
    """Test runner that skips the slow 'acceptance' tag unless asked for it.

    The acceptance suite re-runs the headline operating points with tens of
    thousands of episodes each. Set ``RUN_ACCEPTANCE=1`` (or pass
    ``--tag acceptance``) to include it.
    """

    def __init__(self, *args: Any, **kwargs: Any) -> None:
        super().__init__(*args, **kwargs)
        if not settings.RUN_ACCEPTANCE and 'acceptance' not in self.tags:
            self.exclude_tags.add('acceptance')
