from django.apps import AppConfig


class MelodyConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "apps.melody"
