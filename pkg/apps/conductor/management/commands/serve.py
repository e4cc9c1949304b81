import logging
import threading

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from apps.conductor.config import EngineConfig
from apps.conductor.engine import Engine
from apps.conductor.exceptions import ConfigError
from apps.conductor.status import StatusPublisher
from apps.osc.exceptions import OscBindError
from apps.osc.receiver import OscReceiver
from apps.render.exceptions import SinkUnavailable
from apps.render.live import EventStreamer, PortSink, RealClock, RecordingSink, RendererThread

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = "Run the engine live: game messages over OSC in, MIDI out, until interrupted"

    def add_arguments(self, parser):
        parser.add_argument("--config", default=str(settings.AMS_DEFAULT_CONFIG))
        parser.add_argument("--host", default=None)
        parser.add_argument("--port", type=int, default=None)
        parser.add_argument("--out", default="session.mid", help="MIDI file written at shutdown")
        parser.add_argument("--no-midi", action="store_true", help="do not open a MIDI output port")

    def handle(self, *args, **options):
        overrides = {}
        if options["host"] is not None:
            overrides["osc.host"] = options["host"]
        if options["port"] is not None:
            overrides["osc.port"] = str(options["port"])
        try:
            config = EngineConfig.load(options["config"], overrides)
        except ConfigError as exc:
            raise CommandError(str(exc), returncode=2) from exc

        clock = RealClock()
        try:
            sink = RecordingSink(clock) if options["no_midi"] else PortSink(config.midi_port or None)
        except SinkUnavailable as exc:
            raise CommandError(str(exc), returncode=2) from exc
        status = StatusPublisher(config.status.key) if config.status.enabled else None
        engine = Engine(
            config,
            streamer=EventStreamer(clock, sink, config.engine.tempo_bpm),
            status=status,
        )
        receiver = OscReceiver(engine.queue, config.osc.host, config.osc.port)
        try:
            receiver.start()
        except OscBindError as exc:
            sink.close()
            raise CommandError(str(exc), returncode=2) from exc

        host, port = receiver.address
        self.stdout.write(self.style.SUCCESS(f"Listening for OSC on {host}:{port}, Ctrl-C to stop."))
        stop = threading.Event()
        renderer = RendererThread(engine.streamer, stop)
        renderer.start()
        try:
            engine.run_live(clock, stop)
        except KeyboardInterrupt:
            self.stdout.write("Stopping...")
        finally:
            stop.set()
            renderer.join()
            receiver.stop()
            engine.shutdown(options["out"])
            sink.close()

        if renderer.error is not None:
            raise CommandError(str(renderer.error), returncode=2)
        self.stdout.write(self.style.SUCCESS(f"Score flushed to {options['out']}."))
