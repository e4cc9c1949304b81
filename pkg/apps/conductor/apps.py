from django.apps import AppConfig


class ConductorConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "apps.conductor"
