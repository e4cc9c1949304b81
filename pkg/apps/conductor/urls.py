from django.urls import path

from .views import EngineStatusView, ReplayJobDetailView, ReplayJobListCreateView, ThemeListView

urlpatterns = [
    path("replays/", ReplayJobListCreateView.as_view(), name="replay-list"),
    path("replays/<int:pk>/", ReplayJobDetailView.as_view(), name="replay-detail"),
    path("engine/status/", EngineStatusView.as_view(), name="engine-status"),
    path("themes/", ThemeListView.as_view(), name="theme-list"),
]
