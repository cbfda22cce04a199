from django.apps import AppConfig


class ProtocolConfig(AppConfig):
    """Configuration for the cooperative relaying protocol application."""
    default_auto_field = "django.db.models.BigAutoField"
    name = "apps.protocol"
    verbose_name = "Протокол ретрансляции"
