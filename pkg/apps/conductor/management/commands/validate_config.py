from django.core.management.base import BaseCommand, CommandError

from apps.conductor.config import EngineConfig
from apps.conductor.exceptions import ConfigError


class Command(BaseCommand):
    help = "Check an engine config file and print the resolved settings"

    def add_arguments(self, parser):
        parser.add_argument("config")

    def handle(self, *args, **options):
        try:
            config = EngineConfig.load(options["config"])
        except ConfigError as exc:
            raise CommandError(str(exc), returncode=2) from exc
        e = config.engine
        self.stdout.write(
            f"{e.style.value} at {e.tempo_bpm:g} BPM in {e.beats_per_measure}/4, "
            f"{config.melody.agents} melody agents, cycle {config.cycle_ms / 1000:g} s"
        )
        self.stdout.write(self.style.SUCCESS("Config OK."))
