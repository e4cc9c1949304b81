"""
Real-time MIDI emission: clocks, sinks and the event streamer that turns
committed score events into timed port messages.
"""
import heapq
import itertools
import logging
import threading
import time
from dataclasses import dataclass, field

import mido

from .exceptions import SinkUnavailable
from .midi import TICKS_PER_BEAT
from .score import NOTE_OFF

logger = logging.getLogger(__name__)


def ticks_to_seconds(ticks, tempo_bpm, ticks_per_beat=TICKS_PER_BEAT):
    return ticks * 60.0 / (tempo_bpm * ticks_per_beat)


class RealClock:
    """Monotonic seconds since start; pausing freezes the reading."""

    def __init__(self):
        self._origin = time.perf_counter()
        self._paused_at = None

    def now(self):
        if self._paused_at is not None:
            return self._paused_at - self._origin
        return time.perf_counter() - self._origin

    @property
    def paused(self):
        return self._paused_at is not None

    def pause(self):
        if self._paused_at is None:
            self._paused_at = time.perf_counter()

    def resume(self):
        if self._paused_at is not None:
            self._origin += time.perf_counter() - self._paused_at
            self._paused_at = None

    def sleep_until(self, t):
        delay = t - self.now()
        if delay > 0:
            time.sleep(delay)


class VirtualClock:
    """Driven by the caller; used by replay and tests."""

    def __init__(self, start=0.0):
        self._now = start
        self.paused = False

    def now(self):
        return self._now

    def advance(self, seconds):
        if not self.paused:
            self._now += seconds

    def pause(self):
        self.paused = True

    def resume(self):
        self.paused = False

    def sleep_until(self, t):
        if not self.paused and t > self._now:
            self._now = t


class PortSink:
    def __init__(self, port_name=None):
        try:
            self._port = mido.open_output(port_name) if port_name else mido.open_output()
        except (OSError, IOError) as exc:
            raise SinkUnavailable(f"cannot open MIDI output {port_name or '(default)'}: {exc}") from exc
        self.name = self._port.name

    def send(self, message):
        try:
            self._port.send(message)
        except (OSError, IOError) as exc:
            raise SinkUnavailable(f"MIDI output {self.name} failed: {exc}") from exc

    def close(self):
        self._port.close()


class RecordingSink:
    def __init__(self, clock):
        self.clock = clock
        self.sent = []

    def send(self, message):
        self.sent.append((self.clock.now(), message))

    def close(self):
        pass


@dataclass(order=True)
class TimedMessage:
    at: float
    seq: int
    message: object = field(compare=False)


class EventStreamer:
    """Single consumer of the timed queue; emits everything whose time has come."""

    def __init__(self, clock, sink, tempo_bpm, poll_s=0.001):
        self.clock = clock
        self.sink = sink
        self.tempo_bpm = tempo_bpm
        self.poll_s = poll_s
        self._heap = []
        self._seq = itertools.count()
        self._lock = threading.Lock()

    def __len__(self):
        with self._lock:
            return len(self._heap)

    def schedule(self, events, origin_ticks=0):
        with self._lock:
            for ev in events:
                at = ticks_to_seconds(ev.tick - origin_ticks, self.tempo_bpm)
                velocity = 0 if ev.kind == NOTE_OFF else ev.velocity
                msg = mido.Message(ev.kind, channel=ev.channel, note=ev.pitch, velocity=velocity)
                heapq.heappush(self._heap, TimedMessage(at, next(self._seq), msg))

    def next_due(self):
        with self._lock:
            return self._heap[0].at if self._heap else None

    def run_pending(self):
        if getattr(self.clock, "paused", False):
            return 0
        now = self.clock.now()
        due = []
        with self._lock:
            while self._heap and self._heap[0].at <= now:
                due.append(heapq.heappop(self._heap))
        for item in due:
            self.sink.send(item.message)
        return len(due)

    def run(self, stop):
        """Blocks until `stop` is set; sink failures propagate to the caller."""
        while not stop.is_set():
            nxt = self.next_due()
            if nxt is None or getattr(self.clock, "paused", False):
                stop.wait(self.poll_s)
                continue
            # wake at least every poll so events scheduled meanwhile are not missed
            self.clock.sleep_until(min(nxt, self.clock.now() + self.poll_s))
            self.run_pending()

    def flush(self):
        """Sends everything still queued immediately (shutdown path)."""
        with self._lock:
            items = [heapq.heappop(self._heap) for _ in range(len(self._heap))]
        for item in items:
            self.sink.send(item.message)
        return len(items)


class RendererThread(threading.Thread):
    """
    Runs `streamer.run(stop)` beside the engine loop.

    A sink failure is kept in `error` and sets `stop`, so the engine loop
    sharing the event winds down too.
    """

    def __init__(self, streamer, stop):
        super().__init__(name="ams-renderer", daemon=True)
        self.streamer = streamer
        self.stop = stop
        self.error = None

    def run(self):
        try:
            self.streamer.run(self.stop)
        except SinkUnavailable as exc:
            logger.error("live output failed: %s", exc)
            self.error = exc
            self.stop.set()


def stream_events(events, clock, sink, tempo_bpm, stop=None):
    """Plays `events` to `sink`; without `stop` it returns once the queue is empty."""
    streamer = EventStreamer(clock, sink, tempo_bpm)
    streamer.schedule(events)
    if stop is None:
        while streamer.next_due() is not None:
            clock.sleep_until(streamer.next_due())
            if not streamer.run_pending() and getattr(clock, "paused", False):
                break
        return streamer
    streamer.run(stop)
    return streamer
