from django.apps import AppConfig


class CliConfig(AppConfig):
    """Configuration for the experiment runner (management commands)."""
    default_auto_field = "django.db.models.BigAutoField"
    name = "apps.cli"
    verbose_name = "Запуск экспериментов"
