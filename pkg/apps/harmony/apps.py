from django.apps import AppConfig


class HarmonyConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "apps.harmony"
