from django.apps import AppConfig


class NetmodelConfig(AppConfig):
    """Configuration for the network model application."""
    default_auto_field = "django.db.models.BigAutoField"
    name = "apps.netmodel"
    verbose_name = "Модель сети"
