from django.contrib import admin

from .models import ReplayJob


@admin.register(ReplayJob)
class ReplayJobAdmin(admin.ModelAdmin):
    list_display = ("id", "trace_path", "status", "cycles", "created_at", "finished_at")
    list_filter = ("status",)
    readonly_fields = ("midi_sha256", "error", "started_at", "finished_at")
