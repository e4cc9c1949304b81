from dataclasses import dataclass
from fractions import Fraction

from .chords import Style
from .context import SLIDE_MEASURES
from .exceptions import ModelError

MAX_CHORDS_PER_BAR = 4


@dataclass(frozen=True)
class ChordProgression:
    segments: tuple  # ((ChordSymbol, measures as Fraction), ...)
    confidence: float  # probability of the first chord
    first_rank: int
    tokens: tuple  # what gets appended to the chord history when committed

    def labels(self):
        return [f"{chord.token}/{measures}" for chord, measures in self.segments]


def _bar_shares(n, cells_per_measure):
    base, extra = divmod(cells_per_measure, n)
    # leftover cells go to the first chord so every share lands on the grid
    return [Fraction(base + (extra if i == 0 else 0), cells_per_measure) for i in range(n)]


class HarmonyAgent:
    def __init__(self, model, style, top_k=8, cells_per_measure=16):
        self.model = model
        self.style = Style(style)
        self.top_k = top_k
        self.cells_per_measure = cells_per_measure

    def propose(self, history, first_rank=1, measures=SLIDE_MEASURES):
        """Feeds predictions back into the model bar by bar until `measures` bars are filled."""
        if self.model is None:
            raise ModelError("harmony agent has no trained chord model")
        tokens = list(history)
        segments = []
        confidence = None
        for _ in range(measures):
            bar = []
            while True:
                rank = first_rank if confidence is None else 1
                chord, p = self.model.next_chord(tokens, self.style, rank)
                if confidence is None:
                    confidence = p
                bar.append(chord)
                tokens.append(chord.token)
                if len(bar) >= MAX_CHORDS_PER_BAR or self.model.bar_ends(tokens, self.style):
                    break
            tokens.append(self.style.value)
            segments.extend(zip(bar, _bar_shares(len(bar), self.cells_per_measure)))
        return ChordProgression(
            segments=tuple(segments),
            confidence=confidence,
            first_rank=first_rank,
            tokens=tuple(tokens[len(history):]),
        )
