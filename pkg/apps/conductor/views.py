from django.conf import settings
from kombu.exceptions import OperationalError as KombuOperationalError
from redis.exceptions import ConnectionError as RedisConnectionError
from rest_framework import status
from rest_framework.generics import ListAPIView, RetrieveAPIView
from rest_framework.response import Response
from rest_framework.views import APIView

from apps.melody.themes import ThemeLibrary
from .models import ReplayJob
from .serializers import ReplayJobCreateSerializer, ReplayJobSerializer
from .status import read_status
from .tasks import run_replay_job


class ReplayJobListCreateView(ListAPIView):
    serializer_class = ReplayJobSerializer
    queryset = ReplayJob.objects.all()

    def post(self, request):
        serializer = ReplayJobCreateSerializer(data=request.data)
        serializer.is_valid(raise_exception=True)
        data = serializer.validated_data
        job = ReplayJob.objects.create(
            trace_path=data["trace"],
            config_path=data["config"],
            output_path=data["out"],
            duration_s=data["duration_s"],
        )
        try:
            run_replay_job.delay(job.id)
        except (KombuOperationalError, RedisConnectionError):
            # no broker: the job stays PENDING
            pass
        return Response(ReplayJobSerializer(job).data, status=status.HTTP_201_CREATED)


class ReplayJobDetailView(RetrieveAPIView):
    serializer_class = ReplayJobSerializer
    queryset = ReplayJob.objects.all()


class EngineStatusView(APIView):
    def get(self, request):
        latest = read_status()
        if latest is None:
            return Response({"available": False})
        return Response({"available": True, **latest})


class ThemeListView(APIView):
    def get(self, request):
        library = ThemeLibrary.load_directory(settings.AMS_ASSETS_DIR / "themes")
        return Response(
            [
                {
                    "id": theme.theme_id,
                    "name": theme.name,
                    "key": str(theme.fragment.key),
                    "length_measures": theme.length_measures,
                    "notes": len(theme.fragment),
                    "digest": theme.digest,
                }
                for theme in library
            ]
        )
