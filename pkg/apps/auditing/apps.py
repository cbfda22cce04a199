# File: apps/auditing/apps.py
import logging
from typing import Any

from django.apps import AppConfig
from django.db.models.signals import post_migrate

logger = logging.getLogger(__name__)


def synchronize_event_types(sender: AppConfig, **kwargs: Any) -> None:
    """
    Ensure Event objects in the database match definitions in events.py.

    Connected to ``post_migrate`` so every fresh database (test databases
    included) holds the event types before anything is logged.

    Args:
        sender: The AppConfig that was migrated.
        **kwargs: Additional keyword arguments from the signal.
    """
    from .events import EVENT_DEFINITIONS
    from .models import Event

    using = kwargs.get("using", "default")
    for event_def in EVENT_DEFINITIONS:
        Event.objects.using(using).update_or_create(
            identifier=event_def["identifier"], defaults={"name": event_def["name"]}
        )
    logger.info("Event types synchronized.")


class AuditingConfig(AppConfig):
    """Configuration for the Auditing application."""
    default_auto_field = "django.db.models.BigAutoField"
    name = "apps.auditing"
    verbose_name = "Аудит и Вебхуки"

    def ready(self) -> None:
        """
        Connect signal handlers and the event type synchronization.
        """
        # Implicitly connect signal handlers decorated with @receiver.
        from . import signals  # noqa: F401

        post_migrate.connect(synchronize_event_types, sender=self)
