import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Protocol

from apps.harmony.chords import Style
from apps.melody.notes import TICKS_PER_BEAT

logger = logging.getLogger(__name__)

GRID = TICKS_PER_BEAT // 4
EIGHTH = TICKS_PER_BEAT // 2
# hard swing lands the off-beat on the third sixteenth so it stays on the grid
SWING = 3 * GRID
GHOST_VELOCITY = 36


class Lane(str, Enum):
    KICK = "kick"
    SNARE = "snare"
    HAT = "hat"
    AUX = "aux"


GM_NOTES = {Lane.KICK: 36, Lane.SNARE: 38, Lane.HAT: 42, Lane.AUX: 46}


@dataclass(frozen=True)
class Hit:
    onset: int
    velocity: int


@dataclass(frozen=True)
class PercussionPhrase:
    length_ticks: int
    lanes: dict = field(default_factory=dict)

    def hits(self, lane):
        return self.lanes.get(Lane(lane), ())

    def onsets(self, lane):
        return [h.onset for h in self.hits(lane)]


class PercussionGenerator(Protocol):
    def generate(self, lowest_line_onsets, style, rng): ...


def _beats(measures, beats_per_measure, which):
    """Onsets of the 1-based beats `which` in every measure."""
    bar = beats_per_measure * TICKS_PER_BEAT
    return [m * bar + (b - 1) * TICKS_PER_BEAT for m in range(measures) for b in which if b <= beats_per_measure]


def _template(style, measures, beats_per_measure):
    beats = range(1, beats_per_measure + 1)
    backbeat = [b for b in beats if b % 2 == 0]
    bar = beats_per_measure * TICKS_PER_BEAT
    length = measures * bar
    if style in (Style.ROCK, Style.POP):
        lanes = {
            Lane.SNARE: [(t, 100) for t in _beats(measures, beats_per_measure, backbeat)],
            Lane.HAT: [(t, 80 if t % TICKS_PER_BEAT == 0 else 64) for t in range(0, length, EIGHTH)],
            Lane.AUX: [(length - EIGHTH, 72)] if style is Style.ROCK else [],
        }
    elif style is Style.JAZZ:
        ride = []
        for t in _beats(measures, beats_per_measure, beats):
            ride.append((t, 84))
            if (t // TICKS_PER_BEAT) % 2 == 1:
                ride.append((t + SWING, 60))
        lanes = {
            Lane.SNARE: [(m * bar + bar - TICKS_PER_BEAT + SWING, 48) for m in range(measures)],
            Lane.HAT: ride,
            Lane.AUX: [(t, 64) for t in _beats(measures, beats_per_measure, backbeat)],
        }
    else:
        accents = [b for b in (1, 3) if b <= beats_per_measure]
        lanes = {
            Lane.SNARE: [(t, 70) for t in _beats(measures, beats_per_measure, accents[1:])],
            Lane.HAT: [(t, 76) for t in _beats(measures, beats_per_measure, accents)],
            Lane.AUX: [],
        }
    return lanes


class TemplatePercussion:
    """Style templates with seeded ghost-note ornaments; the kick doubles the lowest line."""

    def __init__(self, ornament_probability=0.1, measures=2, beats_per_measure=4, kick_velocity=100):
        self.ornament_probability = ornament_probability
        self.measures = measures
        self.beats_per_measure = beats_per_measure
        self.kick_velocity = kick_velocity

    @property
    def length_ticks(self):
        return self.measures * self.beats_per_measure * TICKS_PER_BEAT

    def generate(self, lowest_line_onsets, style, rng):
        length = self.length_ticks
        onsets = sorted(set(int(t) for t in lowest_line_onsets))
        if onsets and (onsets[0] < 0 or onsets[-1] >= length):
            raise ValueError(f"kick onsets must lie in [0, {length})")
        lanes = {
            lane: dict(hits) for lane, hits in _template(Style(style), self.measures, self.beats_per_measure).items()
        }
        # ghost snares on the off-beat eighths
        snare = lanes[Lane.SNARE]
        for t in range(EIGHTH, length, TICKS_PER_BEAT):
            if rng.random() < self.ornament_probability and t not in snare:
                snare[t] = GHOST_VELOCITY
        phrase = {Lane.KICK: tuple(Hit(t, self.kick_velocity) for t in onsets)}
        for lane, hits in lanes.items():
            phrase[lane] = tuple(Hit(t, v) for t, v in sorted(hits.items()))
        return PercussionPhrase(length, phrase)


def generate_percussion(lowest_line_onsets, style, rng, ornament_probability=0.1, beats_per_measure=4):
    return TemplatePercussion(ornament_probability, beats_per_measure=beats_per_measure).generate(
        lowest_line_onsets, style, rng
    )
