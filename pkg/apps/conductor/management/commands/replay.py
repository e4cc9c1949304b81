from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from apps.conductor.config import EngineConfig
from apps.conductor.engine import replay
from apps.conductor.exceptions import ConductorError
from apps.conductor.trace import load_trace
from apps.harmony.exceptions import HarmonyError
from apps.melody.exceptions import MelodyError
from apps.render.exceptions import RenderError


class Command(BaseCommand):
    help = "Replay a JSON-lines trace through the engine on virtual time and write MIDI plus logs"

    def add_arguments(self, parser):
        parser.add_argument("--trace", required=True)
        parser.add_argument("--config", default=str(settings.AMS_DEFAULT_CONFIG))
        parser.add_argument("--out", required=True)
        parser.add_argument("--duration", type=float, default=None, help="seconds (default: engine.duration_s)")
        parser.add_argument("--seed", type=int, default=None)

    def handle(self, *args, **options):
        if not options["out"].endswith(".mid"):
            raise CommandError("--out must name a .mid file", returncode=1)
        overrides = {"engine.seed": str(options["seed"])} if options["seed"] is not None else None
        try:
            config = EngineConfig.load(options["config"], overrides)
            summary = replay(load_trace(options["trace"]), config, options["out"], options["duration"])
        except (ConductorError, HarmonyError, MelodyError, RenderError) as exc:
            raise CommandError(str(exc), returncode=2) from exc

        self.stdout.write(f"cycles: {summary.cycles}, notes: {summary.notes}")
        self.stdout.write(f"events: {summary.event_log_path}")
        self.stdout.write(f"score:  {summary.score_log_path}")
        self.stdout.write(self.style.SUCCESS(f"Wrote {summary.midi_path} (sha256 {summary.midi_sha256})."))
