from dataclasses import dataclass

PERCUSSION_CHANNEL = 9
NOTE_ON = "note_on"
NOTE_OFF = "note_off"


@dataclass(frozen=True)
class ScoreNote:
    instrument: str
    channel: int
    pitch: int
    start: int
    duration: int
    velocity: int
    agent_id: int | None = None
    program: int = 0

    @property
    def end(self):
        return self.start + self.duration


@dataclass(frozen=True)
class ScoreEvent:
    tick: int
    kind: str
    channel: int
    pitch: int
    velocity: int


def event_order(event):
    # note-offs first at equal ticks so a repeated pitch re-strikes cleanly
    return (event.tick, 0 if event.kind == NOTE_OFF else 1, event.channel, event.pitch)


class Score:
    """Append-only record of committed notes, grouped by instrument track."""

    def __init__(self):
        self._tracks = {}
        self._programs = {}
        self._raw = {}

    def add(self, note):
        if note.duration < 1:
            raise ValueError("score notes need a positive duration")
        self._tracks.setdefault(note.instrument, []).append(note)
        self._programs.setdefault(note.instrument, (note.channel, note.program))

    def extend(self, notes):
        for note in notes:
            self.add(note)

    def add_event(self, instrument, event):
        """Low-level escape hatch for pre-built events; checked when the file is written."""
        self._raw.setdefault(instrument, []).append(event)

    @property
    def instruments(self):
        return list(dict.fromkeys([*self._tracks, *self._raw]))

    def program(self, instrument):
        return self._programs.get(instrument)

    def notes(self, instrument=None):
        if instrument is not None:
            return list(self._tracks.get(instrument, ()))
        return [n for name in self._tracks for n in self._tracks[name]]

    def events(self, instrument):
        events = list(self._raw.get(instrument, ()))
        for n in self._tracks.get(instrument, ()):
            events.append(ScoreEvent(n.start, NOTE_ON, n.channel, n.pitch, n.velocity))
            events.append(ScoreEvent(n.end, NOTE_OFF, n.channel, n.pitch, 0))
        return sorted(events, key=event_order)

    @property
    def end_tick(self):
        return max((n.end for n in self.notes()), default=0)

    def __len__(self):
        return sum(len(v) for v in self._tracks.values())
