# File: apps/auditing/signals.py
import logging
from typing import Any, Dict, Type

from django.contrib.auth.models import AbstractBaseUser
from django.contrib.auth.signals import user_logged_in
from django.db.models.signals import post_save
from django.dispatch import Signal, receiver
from django.http import HttpRequest

from apps.experiments.models import ExperimentRun

from .models import Event, LogEntry
from .utils import get_client_ip
from .webhooks import trigger_webhooks

logger = logging.getLogger(__name__)

# Custom signal for more flexible event logging
event_logged = Signal()


def create_log_and_trigger_webhooks(event_identifier: str, **kwargs: Any) -> None:
    """
    Create a LogEntry and trigger associated webhooks for a given event.

    Failures are logged and swallowed: auditing must never abort a
    simulation run or an API request.

    Args:
        event_identifier: The unique identifier for the event (e.g., 'RUN_FINISHED').
        **kwargs: A dictionary of context for the event, which can include
            'user', 'run', 'details', and 'instance'.
    """
    try:
        event = Event.objects.get(identifier=event_identifier)
        log_entry = LogEntry.objects.create(
            event=event,
            user=kwargs.get("user"),
            run=kwargs.get("run"),
            details=kwargs.get("details", {}),
        )
        trigger_webhooks(log_entry=log_entry, instance=kwargs.get("instance"))

    except Event.DoesNotExist:
        logger.debug(f"Event type '{event_identifier}' is not synchronized; nothing recorded.")
    except Exception as e:
        logger.warning(f"Could not record event '{event_identifier}': {e}")


@receiver(event_logged)
def handle_custom_event(sender: Type[Any], event_identifier: str, **kwargs: Any) -> None:
    """
    Receive the custom 'event_logged' signal and process it.

    Args:
        sender: The sender of the signal.
        event_identifier: The unique identifier for the event.
        **kwargs: Additional context for the event.
    """
    create_log_and_trigger_webhooks(event_identifier, **kwargs)


@receiver(user_logged_in)
def handle_admin_login(sender: Type[Any], request: HttpRequest, user: AbstractBaseUser, **kwargs: Any) -> None:
    """
    Log an event when a user logs into the Django admin.

    Args:
        sender: The sender of the signal.
        request: The HttpRequest object for the login request.
        user: The user who logged in.
        **kwargs: Additional keyword arguments from the signal.
    """
    details: Dict[str, Any] = {
        "ip_address": get_client_ip(request),
        "user_agent": request.META.get("HTTP_USER_AGENT"),
    }
    create_log_and_trigger_webhooks("ADMIN_LOGIN", user=user, details=details)


@receiver(post_save, sender=ExperimentRun)
def handle_new_run(sender: Type[ExperimentRun], instance: ExperimentRun, created: bool, **kwargs: Any) -> None:
    """
    Log an event when a new ExperimentRun is created.

    Terminal states are reported by the runner itself, which knows why the
    run ended.

    Args:
        sender: The model class that sent the signal (ExperimentRun).
        instance: The run being saved.
        created: A boolean indicating if a new record was created.
        **kwargs: Additional keyword arguments from the signal.
    """
    if created:
        details: Dict[str, Any] = {
            "name": instance.name,
            "source": instance.source,
            "seed": instance.seed,
            "workers": instance.workers,
            "trials_scale": instance.trials_scale,
        }
        create_log_and_trigger_webhooks("RUN_STARTED", run=instance, details=details, instance=instance)
