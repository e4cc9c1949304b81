"""
Affect-driven reward and style scoring for placed phrases.

Each affect pulls one musical feature toward a target: excitement, sadness
and tenderness look at note density, happiness at the diatonic fraction,
threat at the mean melodic leap. Anger is encoded but earns no reward.
"""
import math
from dataclasses import dataclass
from fractions import Fraction

from apps.harmony.chords import Style
from .exceptions import MelodyError
from .notes import TICKS_PER_BEAT

STYLE_RANGE = {
    Style.JAZZ: 1.0,
    Style.POP: 0.8,
    Style.ROCK: 0.8,
    Style.FOLK: 0.7,
}


@dataclass(frozen=True)
class FragmentFeatures:
    notes_per_second: float
    mean_interval: float
    diatonic_fraction: float
    notes_per_beat: float
    off_beat: int


@dataclass(frozen=True)
class RewardBreakdown:
    excitement: float
    happiness: float
    sadness: float
    tenderness: float
    threat: float

    @property
    def total(self):
        return self.excitement + self.happiness + self.sadness + self.tenderness + self.threat


def extract_features(fragment, tempo_bpm, onset_offset=0, ticks_per_beat=TICKS_PER_BEAT):
    """`onset_offset` places the fragment on the bar grid for the off-beat test."""
    if not fragment.notes:
        raise MelodyError("features are undefined for an empty fragment")
    notes = fragment.notes
    beats = fragment.length_ticks / ticks_per_beat
    seconds = beats * 60.0 / tempo_bpm
    steps = [abs(b.pitch - a.pitch) for a, b in zip(notes, notes[1:])]
    scale = fragment.key.pitch_classes
    return FragmentFeatures(
        notes_per_second=len(notes) / seconds,
        mean_interval=sum(steps) / len(steps) if steps else 0.0,
        diatonic_fraction=sum(n.pitch % 12 in scale for n in notes) / len(notes),
        notes_per_beat=len(notes) / beats,
        off_beat=int((notes[0].onset + onset_offset) % ticks_per_beat != 0),
    )


def reward_breakdown(snapshot, features, normalize_happiness=True):
    tempo_term = (features.notes_per_second - 0.5) / 25
    happiness = snapshot.happiness / 100 if normalize_happiness else snapshot.happiness
    return RewardBreakdown(
        excitement=0.2 - abs(snapshot.excitement / 500 - tempo_term),
        happiness=0.2 - abs(happiness - features.diatonic_fraction),
        sadness=abs(snapshot.sadness / 500 - tempo_term),
        tenderness=abs(snapshot.tenderness / 500 - tempo_term),
        threat=0.2 - abs(snapshot.threat / 500 - (features.mean_interval / 6) / 5),
    )


def reward(snapshot, features, normalize_happiness=True):
    return reward_breakdown(snapshot, features, normalize_happiness).total


def realize_reward(snapshot, fragment, tempo_bpm, onset_offset=0, normalize_happiness=True):
    features = extract_features(fragment, tempo_bpm, onset_offset)
    return reward(snapshot, features, normalize_happiness)


def style_score(features, style, agent_count):
    if agent_count < 1:
        raise MelodyError("agent count must be at least 1")
    style = Style(style)
    n_b = features.notes_per_beat
    if style is Style.JAZZ:
        return abs(1 - n_b) + features.off_beat
    if style in (Style.ROCK, Style.POP):
        return abs(1 / agent_count - n_b)
    return abs(1 - n_b)


def max_range(agent_count, style, style_range=None):
    """M_r = floor(12 * S_r * N) semitones between agent 1's top and agent 2's bottom."""
    if agent_count < 1:
        raise MelodyError("agent count must be at least 1")
    ranges = style_range or STYLE_RANGE
    try:
        s_r = ranges[Style(style)]
    except (KeyError, ValueError):
        raise MelodyError(f"no range factor for style {style!r}") from None
    # decimal reading of S_r keeps 12 * 0.7 * 4 from landing just under 33.6
    return math.floor(Fraction(str(s_r)) * 12 * agent_count)
