import json
import shlex
import sys

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from apps.conductor.config import EngineConfig
from apps.conductor.engine import Engine
from apps.conductor.exceptions import ConfigError
from apps.conductor.trace import TraceEvent
from apps.osc.messages import ADDR_ACTIVATE, ADDR_AFFECT, ADDR_EDGE, ADDR_THEME

HELP = """commands:
  activate NAME LEVEL [object|environment] [set|add]
  affect CATEGORY LEVEL [set|add]
  edge A B WEIGHT
  theme CONCEPT ID
  tick [N]        advance N engine ticks (default 1)
  dump            print the concept graph
  snapshot        print the affect snapshot
  help
  quit"""


def _message(parts):
    """(address, args) for an injecting command, or None when it is not one."""
    cmd, rest = parts[0], parts[1:]
    if cmd == "activate" and 2 <= len(rest) <= 4:
        name, level = rest[0], float(rest[1])
        kind = rest[2] if len(rest) > 2 else "object"
        mode = rest[3] if len(rest) > 3 else "set"
        return ADDR_ACTIVATE, [name, kind, level, mode]
    if cmd == "affect" and 2 <= len(rest) <= 3:
        return ADDR_AFFECT, [rest[0], float(rest[1]), rest[2] if len(rest) > 2 else "set"]
    if cmd == "edge" and len(rest) == 3:
        return ADDR_EDGE, [rest[0], rest[1], float(rest[2])]
    if cmd == "theme" and len(rest) == 2:
        return ADDR_THEME, [rest[0], rest[1]]
    return None


class Command(BaseCommand):
    help = "Interactive session for injecting game messages into a running engine"
    stealth_options = ("stdin",)

    def add_arguments(self, parser):
        parser.add_argument("--config", default=str(settings.AMS_DEFAULT_CONFIG))
        parser.add_argument("--out", default="repl.mid", help="MIDI file written on quit")

    def handle(self, *args, **options):
        try:
            config = EngineConfig.load(options["config"])
        except ConfigError as exc:
            raise CommandError(str(exc), returncode=2) from exc
        engine = Engine(config)
        tick = config.engine.tick_ms
        stdin = options.get("stdin") or sys.stdin

        for line in stdin:
            try:
                parts = shlex.split(line)
            except ValueError:
                parts = ["help"]
            if not parts:
                continue
            cmd = parts[0]
            if cmd in ("quit", "exit"):
                break
            if cmd == "dump":
                self.stdout.write(engine.graph.dump().rstrip("\n"))
                continue
            if cmd == "snapshot":
                self.stdout.write(json.dumps(engine.graph.affect_snapshot().as_dict(), sort_keys=True))
                continue
            if cmd == "tick":
                count = int(parts[1]) if len(parts) > 1 and parts[1].isdigit() else 1
                for _ in range(count):
                    engine.step(tick)
                continue
            try:
                message = _message(parts)
            except ValueError:
                message = None
            if message is None:
                self.stdout.write(HELP)
                continue
            engine.feed(TraceEvent(engine.clock_ms, *message))
            engine.step(tick)

        engine.shutdown(options["out"])
        self.stdout.write(self.style.SUCCESS(f"Score flushed to {options['out']}."))
