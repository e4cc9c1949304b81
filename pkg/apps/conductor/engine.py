"""
The engine loop. Every tick drains the OSC queue into the concept graph,
advances the graph, evolves themes that were asked for, and composes each
two-measure cycle one cycle ahead of playback.
"""
import hashlib
import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from apps.context.exceptions import ContextError
from apps.context.graph import ConceptGraph
from apps.melody.evolution import evolve_theme
from apps.melody.exceptions import MelodyError
from apps.melody.themes import Theme, ThemeLibrary
from apps.osc.codec import decode_packet, encode_raw
from apps.osc.exceptions import OscDecodeError
from apps.osc.receiver import MessageQueue
from apps.render.exceptions import SinkUnavailable
from apps.render.midi import write_midi
from apps.render.score import NOTE_OFF, NOTE_ON, ScoreEvent
from apps.render.scorelog import ScoreLogWriter
from .cycle import composition_cycle
from .eventlog import EventLogWriter
from .state import ScoreState
from .status import engine_status

logger = logging.getLogger(__name__)


def note_events(notes):
    events = []
    for n in notes:
        events.append(ScoreEvent(n.start, NOTE_ON, n.channel, n.pitch, n.velocity))
        events.append(ScoreEvent(n.end, NOTE_OFF, n.channel, n.pitch, 0))
    return events


class Engine:
    def __init__(
        self,
        config,
        library=None,
        state=None,
        queue=None,
        event_log=None,
        score_log=None,
        streamer=None,
        status=None,
    ):
        self.config = config
        self.library = library if library is not None else ThemeLibrary.load_directory(config.theme_dir)
        self.state = state or ScoreState.initial(config)
        self.graph = ConceptGraph(config.graph)
        self.queue = queue or MessageQueue(config.osc.queue_capacity)
        self.event_log = event_log
        self.score_log = score_log
        self.streamer = streamer
        self.status = status
        self.evolution_rng = np.random.default_rng([config.engine.seed, 1])
        self.clock_ms = 0
        self.cycle_ms = config.cycle_ms
        self.results = []

    @property
    def next_cycle(self):
        return self.state.cycle_index

    def due_ms(self, cycle_index):
        """Cycle k is composed one cycle ahead of the moment it starts to sound."""
        return max(0.0, (cycle_index - 1) * self.cycle_ms)

    # ----------------------------------------------------------------- inputs

    def apply_pending(self):
        applied = 0
        for message in self.queue.drain():
            try:
                self.graph.apply(message)
                applied += 1
            except ContextError as exc:
                logger.warning("ignoring %r: %s", message, exc)
        return applied

    def evolve_themes(self):
        for concept in self.graph.pop_theme_requests():
            self.evolve_theme_for(concept)

    def evolve_theme_for(self, concept):
        parents = [self.library.get(t) for t in self.graph.nearest_themed(concept, 2)]
        parents = [p for p in parents if p is not None]
        if not parents:
            logger.warning("no themed concept reachable from %r, leaving it unthemed", concept)
            return None
        theme_id = self.library.next_free_id()
        if theme_id is None:
            logger.warning("theme ids exhausted, %r stays unthemed", concept)
            return None
        a, b = parents[0], parents[-1]
        try:
            fragment = evolve_theme(
                a.fragment,
                b.fragment,
                self.evolution_rng,
                mutation_rate=self.config.themes.mutation_rate,
                beats_per_measure=self.config.engine.beats_per_measure,
            )
        except MelodyError as exc:
            logger.warning("theme evolution for %r failed: %s", concept, exc)
            return None
        theme = self.library.add(Theme(theme_id, fragment, name=concept))
        self.graph.assign_theme(concept, theme_id)
        logger.info("evolved theme %d for %r from themes %d and %d", theme_id, concept, a.theme_id, b.theme_id)
        return theme

    # ------------------------------------------------------------ composition

    def current_theme(self):
        dominant = self.graph.dominant_theme()
        theme_id, concept = dominant if dominant else (self.config.themes.default_id, None)
        theme = self.library.get(theme_id)
        if theme is None:
            logger.warning("theme %d is not in the library, using theme %d", theme_id, self.config.themes.default_id)
            theme = self.library.get(self.config.themes.default_id)
        if theme is None:
            raise MelodyError(f"default theme {self.config.themes.default_id} is missing")
        return theme, concept

    def compose(self):
        snapshot = self.graph.affect_snapshot()
        theme, concept = self.current_theme()
        result = composition_cycle(self.state, snapshot, theme, self.config)
        context = {
            "event": "context",
            "cycle": result.cycle_index,
            "t_ms": self.clock_ms,
            "theme": theme.theme_id,
            "concept": concept,
            "affect": snapshot.as_dict(),
        }
        if self.event_log is not None:
            self.event_log.write([context, *result.records])
        if self.score_log is not None:
            self.score_log.write(result.notes)
        if self.streamer is not None:
            self.streamer.schedule(note_events(result.notes))
        if self.status is not None:
            self.status.publish(
                engine_status(self.state, snapshot, theme.theme_id, result.leader, self.queue.dropped)
            )
        self.results.append(result)
        return result

    def step(self, dt_ms, limit=None):
        """One engine tick; composes every cycle that has come due (up to `limit` cycles in total)."""
        self.apply_pending()
        self.evolve_themes()
        composed = []
        while (limit is None or self.next_cycle < limit) and self.due_ms(self.next_cycle) <= self.clock_ms:
            composed.append(self.compose())
        self.graph.tick(dt_ms)
        self.clock_ms += dt_ms
        return composed

    # ------------------------------------------------------------------ loops

    def cycles_for(self, duration_s):
        return max(1, math.ceil(duration_s * 1000.0 / self.cycle_ms))

    def feed(self, event):
        try:
            self.queue.put_many(decode_packet(encode_raw(event.addr, event.args)))
        except (OscDecodeError, ValueError) as exc:
            logger.warning("skipping trace event %s: %s", event.addr, exc)

    def run_replay(self, events, duration_s):
        """Virtual-time run: trace events go through the wire codec at their timestamps."""
        total = self.cycles_for(duration_s)
        tick = self.config.engine.tick_ms
        pending = list(events)
        index = 0
        while self.next_cycle < total:
            while index < len(pending) and pending[index].t_ms <= self.clock_ms:
                self.feed(pending[index])
                index += 1
            self.step(tick, limit=total)
        return total

    def run_live(self, clock, stop):
        """
        Real-time run until `stop` is set.

        Only composes and schedules; emission belongs to the renderer thread
        consuming `self.streamer` (see `apps.render.live.RendererThread`).
        """
        tick = self.config.engine.tick_ms
        deadline = clock.now()
        while not stop.is_set():
            self.step(tick)
            deadline += tick / 1000.0
            clock.sleep_until(deadline)

    def shutdown(self, midi_path=None):
        if self.streamer is not None:
            try:
                self.streamer.flush()
            except SinkUnavailable as exc:
                logger.error("could not flush live output: %s", exc)
        if self.config.xcs.persist:
            self.state.save_populations(self.config)
        if midi_path:
            self.write_midi(midi_path)

    def write_midi(self, path):
        e = self.config.engine
        return write_midi(self.state.score, e.tempo_bpm, path, (e.beats_per_measure, 4))


@dataclass(frozen=True)
class ReplaySummary:
    cycles: int
    notes: int
    midi_path: Path
    event_log_path: Path
    score_log_path: Path
    midi_sha256: str


def log_paths(out_path):
    out_path = Path(out_path)
    return out_path.with_suffix(".events.jsonl"), out_path.with_suffix(".score.jsonl")


def replay(events, config, out_path, duration_s=None, library=None, model=None):
    """
    Runs a trace through the whole engine on virtual time and writes MIDI plus
    both logs. A passed library is copied, evolved themes never leak out.
    """
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    events_path, score_path = log_paths(out_path)
    duration_s = duration_s or config.engine.duration_s
    with open(events_path, "w", encoding="utf-8") as ev, open(score_path, "w", encoding="utf-8") as sc:
        engine = Engine(
            config,
            library=ThemeLibrary(library) if library is not None else None,
            state=ScoreState.initial(config, model),
            event_log=EventLogWriter(ev),
            score_log=ScoreLogWriter(sc),
        )
        cycles = engine.run_replay(events, duration_s)
        engine.shutdown(out_path)
    digest = hashlib.sha256(out_path.read_bytes()).hexdigest()
    logger.info("replayed %d cycles into %s (sha256 %s)", cycles, out_path, digest[:12])
    return ReplaySummary(cycles, len(engine.state.score), out_path, events_path, score_path, digest)
