from django.apps import AppConfig


class ContentionConfig(AppConfig):
    """Configuration for the pulse-based relay contention application."""
    default_auto_field = "django.db.models.BigAutoField"
    name = "apps.contention"
    verbose_name = "Конкурентный выбор ретранслятора"
