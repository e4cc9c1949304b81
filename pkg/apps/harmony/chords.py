import re
from dataclasses import dataclass
from enum import Enum

PITCH_NAMES = ("C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B")
_NATURALS = {"C": 0, "D": 2, "E": 4, "F": 5, "G": 7, "A": 9, "B": 11}
_SYMBOL = re.compile(r"^([A-G])([#b]?)(.*)$")


class Style(str, Enum):
    POP = "pop"
    ROCK = "rock"
    JAZZ = "jazz"
    FOLK = "folk"


STYLE_TOKENS = frozenset(s.value for s in Style)


class Quality(str, Enum):
    MAJ = "maj"
    MIN = "min"
    DOM7 = "dom7"
    MAJ7 = "maj7"
    MIN7 = "min7"
    DIM = "dim"
    AUG = "aug"
    SUS4 = "sus4"


QUALITY_ORDER = tuple(Quality)

INTERVALS = {
    Quality.MAJ: (0, 4, 7),
    Quality.MIN: (0, 3, 7),
    Quality.DOM7: (0, 4, 7, 10),
    Quality.MAJ7: (0, 4, 7, 11),
    Quality.MIN7: (0, 3, 7, 10),
    Quality.DIM: (0, 3, 6),
    Quality.AUG: (0, 4, 8),
    Quality.SUS4: (0, 5, 7),
}

# chart spellings accepted by the corpus reader
SUFFIXES = {
    "": Quality.MAJ,
    "maj": Quality.MAJ,
    "M": Quality.MAJ,
    "m": Quality.MIN,
    "min": Quality.MIN,
    "-": Quality.MIN,
    "7": Quality.DOM7,
    "dom7": Quality.DOM7,
    "maj7": Quality.MAJ7,
    "M7": Quality.MAJ7,
    "m7": Quality.MIN7,
    "min7": Quality.MIN7,
    "-7": Quality.MIN7,
    "dim": Quality.DIM,
    "o": Quality.DIM,
    "aug": Quality.AUG,
    "+": Quality.AUG,
    "sus4": Quality.SUS4,
    "sus": Quality.SUS4,
}


@dataclass(frozen=True)
class ChordSymbol:
    root: int
    quality: Quality

    def __post_init__(self):
        if not 0 <= self.root < 12:
            raise ValueError(f"root pitch class {self.root!r} outside 0..11")
        object.__setattr__(self, "quality", Quality(self.quality))

    @property
    def token(self):
        return f"{PITCH_NAMES[self.root]}:{self.quality.value}"

    @property
    def pitch_classes(self):
        return tuple((self.root + i) % 12 for i in INTERVALS[self.quality])

    @property
    def dictionary_index(self):
        return self.root * len(QUALITY_ORDER) + QUALITY_ORDER.index(self.quality)

    def __str__(self):
        return self.token

    @classmethod
    def parse(cls, text):
        """Reads chart spellings such as 'Bb7', 'F#m', 'Cmaj7'."""
        match = _SYMBOL.match(text.strip())
        if not match:
            raise ValueError(f"not a chord symbol: {text!r}")
        letter, accidental, suffix = match.groups()
        root = _NATURALS[letter] + {"#": 1, "b": -1, "": 0}[accidental]
        if suffix not in SUFFIXES:
            raise ValueError(f"unknown chord quality in {text!r}")
        return cls(root % 12, SUFFIXES[suffix])

    @classmethod
    def from_token(cls, token):
        name, sep, quality = token.partition(":")
        if not sep or name not in PITCH_NAMES:
            raise ValueError(f"not a chord token: {token!r}")
        return cls(PITCH_NAMES.index(name), Quality(quality))


def is_style_token(token):
    return token in STYLE_TOKENS


def token_order(token):
    """Fixed dictionary order: chords by (root, quality), then style tokens."""
    if is_style_token(token):
        return (1, tuple(Style).index(Style(token)))
    return (0, ChordSymbol.from_token(token).dictionary_index)
