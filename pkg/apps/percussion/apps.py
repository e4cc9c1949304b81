from django.apps import AppConfig


class PercussionConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "apps.percussion"
