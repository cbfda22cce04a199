from django.apps import AppConfig


class AnalyticConfig(AppConfig):
    """Configuration for the analytic approximation application."""
    default_auto_field = "django.db.models.BigAutoField"
    name = "apps.analytic"
    verbose_name = "Аналитическое приближение"
