from django.apps import AppConfig


class ExperimentsConfig(AppConfig):
    """Configuration for the Experiments application."""
    default_auto_field = "django.db.models.BigAutoField"
    name = "apps.experiments"
    verbose_name = "Эксперименты"
