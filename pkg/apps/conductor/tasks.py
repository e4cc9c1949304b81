import logging

from celery import shared_task
from django.utils import timezone

from apps.harmony.exceptions import HarmonyError
from apps.melody.exceptions import MelodyError
from apps.render.exceptions import RenderError
from .config import EngineConfig
from .engine import replay
from .exceptions import ConductorError
from .models import ReplayJob
from .trace import load_trace

logger = logging.getLogger(__name__)


@shared_task
def run_replay_job(job_id):
    try:
        job = ReplayJob.objects.get(id=job_id)
    except ReplayJob.DoesNotExist:
        return

    job.status = ReplayJob.STATUS_RUNNING
    job.started_at = timezone.now()
    job.save(update_fields=["status", "started_at"])
    try:
        config = EngineConfig.load(job.config_path or None)
        summary = replay(load_trace(job.trace_path), config, job.output_path, job.duration_s)
    except (ConductorError, HarmonyError, MelodyError, RenderError, OSError) as exc:
        logger.warning("replay job %d failed: %s", job.id, exc)
        job.status = ReplayJob.STATUS_FAILED
        job.error = str(exc)
    else:
        job.status = ReplayJob.STATUS_DONE
        job.cycles = summary.cycles
        job.midi_sha256 = summary.midi_sha256
    job.finished_at = timezone.now()
    job.save()
