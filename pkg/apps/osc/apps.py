from django.apps import AppConfig


class OscConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "apps.osc"
