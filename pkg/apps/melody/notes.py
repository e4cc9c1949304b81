from dataclasses import dataclass, replace

from apps.harmony.chords import PITCH_NAMES

TICKS_PER_BEAT = 480
BEATS_PER_MEASURE = 4
MAJOR_STEPS = (0, 2, 4, 5, 7, 9, 11)
MINOR_STEPS = (0, 2, 3, 5, 7, 8, 10)


def measure_ticks(beats_per_measure=BEATS_PER_MEASURE, ticks_per_beat=TICKS_PER_BEAT):
    return beats_per_measure * ticks_per_beat


@dataclass(frozen=True)
class Note:
    pitch: int
    onset: int
    duration: int
    velocity: int = 96

    def __post_init__(self):
        if not 0 <= self.pitch <= 127:
            raise ValueError(f"pitch {self.pitch} outside MIDI range")
        if self.onset < 0:
            raise ValueError("onset must be non-negative")
        if self.duration < 1:
            raise ValueError("duration must be at least one tick")
        if not 1 <= self.velocity <= 127:
            raise ValueError(f"velocity {self.velocity} outside 1..127")

    @property
    def end(self):
        return self.onset + self.duration


@dataclass(frozen=True)
class Key:
    tonic: int = 0
    mode: str = "major"

    def __post_init__(self):
        if self.mode not in ("major", "minor"):
            raise ValueError(f"unknown mode {self.mode!r}")
        object.__setattr__(self, "tonic", self.tonic % 12)

    @property
    def pitch_classes(self):
        steps = MAJOR_STEPS if self.mode == "major" else MINOR_STEPS
        return frozenset((self.tonic + s) % 12 for s in steps)

    def transpose(self, semitones):
        return Key(self.tonic + semitones, self.mode)

    def __str__(self):
        return f"{PITCH_NAMES[self.tonic]} {self.mode}"

    @classmethod
    def parse(cls, text):
        name, _, mode = text.strip().partition(" ")
        flats = {"Db": "C#", "Eb": "D#", "Gb": "F#", "Ab": "G#", "Bb": "A#"}
        name = flats.get(name, name)
        if name not in PITCH_NAMES:
            raise ValueError(f"unknown key tonic {name!r}")
        return cls(PITCH_NAMES.index(name), mode.strip() or "major")


@dataclass(frozen=True)
class MelodicFragment:
    """Notes sorted by (onset, pitch) inside a fixed length; `clamped` marks pitches pinned to 0..127."""

    notes: tuple
    length_ticks: int
    key: Key = Key()
    clamped: bool = False

    def __post_init__(self):
        if self.length_ticks < 1:
            raise ValueError("fragment length must be positive")
        object.__setattr__(
            self, "notes", tuple(sorted(self.notes, key=lambda n: (n.onset, n.pitch)))
        )

    def __len__(self):
        return len(self.notes)

    @property
    def end(self):
        return max((n.end for n in self.notes), default=0)

    @property
    def lowest(self):
        return min(n.pitch for n in self.notes)

    @property
    def highest(self):
        return max(n.pitch for n in self.notes)

    def measures(self, beats_per_measure=BEATS_PER_MEASURE):
        return self.length_ticks / measure_ticks(beats_per_measure)

    def is_monophonic(self):
        return all(a.end <= b.onset for a, b in zip(self.notes, self.notes[1:]))

    def transpose(self, semitones):
        return replace(
            self,
            notes=tuple(replace(n, pitch=n.pitch + semitones) for n in self.notes),
            key=self.key.transpose(semitones),
        )

    def truncated(self, length_ticks):
        """Drops notes starting at or after length_ticks and cuts the ones crossing it."""
        if length_ticks >= self.length_ticks and self.end <= length_ticks:
            return self
        notes = tuple(
            replace(n, duration=min(n.duration, length_ticks - n.onset))
            for n in self.notes
            if n.onset < length_ticks
        )
        return replace(self, notes=notes, length_ticks=min(self.length_ticks, length_ticks))
