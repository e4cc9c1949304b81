from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from apps.conductor.demo_traces import DEMO_TRACES, soak_trace
from apps.conductor.trace import write_trace


class Command(BaseCommand):
    help = "Regenerate the bundled demo traces (and optionally a random soak trace)"

    def add_arguments(self, parser):
        parser.add_argument("--out-dir", default=str(settings.AMS_ASSETS_DIR / "traces"))
        parser.add_argument("--duration", type=int, default=60)
        parser.add_argument(
            "--soak", type=int, default=0, metavar="N", help="also write a trace over N random concepts"
        )
        parser.add_argument("--seed", type=int, default=0)

    def handle(self, *args, **options):
        if options["duration"] < 1:
            raise CommandError("--duration must be positive", returncode=1)
        out_dir = Path(options["out_dir"])
        out_dir.mkdir(parents=True, exist_ok=True)
        self.stdout.write("Writing demo traces...")

        for name, build in DEMO_TRACES.items():
            events = build(options["duration"])
            write_trace(events, out_dir / f"{name}.jsonl")
            self.stdout.write(f"  {name}: {len(events)} events")

        if options["soak"]:
            events = soak_trace(options["soak"], options["duration"], options["seed"])
            write_trace(events, out_dir / f"soak_{options['soak']}.jsonl")
            self.stdout.write(f"  soak_{options['soak']}: {len(events)} events")

        self.stdout.write(self.style.SUCCESS("Seeding complete."))
