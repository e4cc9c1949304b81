from django.apps import AppConfig


class XcsConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "apps.xcs"
