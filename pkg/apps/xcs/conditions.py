from dataclasses import dataclass

from .exceptions import XcsError

WILDCARD = "#"


def situation_bits(situation):
    """'0110...' -> int, most significant bit first."""
    if not situation or set(situation) - {"0", "1"}:
        raise XcsError(f"not a binary situation: {situation!r}")
    return int(situation, 2)


@dataclass(frozen=True)
class Condition:
    """Ternary condition stored as (bits, mask); a clear mask bit is a wildcard."""

    bits: int
    mask: int
    length: int

    def __post_init__(self):
        object.__setattr__(self, "bits", self.bits & self.mask)

    @classmethod
    def parse(cls, text):
        bits = mask = 0
        for char in text:
            bits <<= 1
            mask <<= 1
            if char == WILDCARD:
                continue
            if char not in "01":
                raise XcsError(f"bad condition character {char!r}")
            mask |= 1
            if char == "1":
                bits |= 1
        return cls(bits, mask, len(text))

    @classmethod
    def cover(cls, situation, wildcard_probability, rng):
        value = situation_bits(situation)
        length = len(situation)
        mask = 0
        for i in range(length):
            if rng.random() >= wildcard_probability:
                mask |= 1 << (length - 1 - i)
        return cls(value, mask, length)

    def __str__(self):
        chars = []
        for i in range(self.length):
            bit = 1 << (self.length - 1 - i)
            chars.append(WILDCARD if not self.mask & bit else "1" if self.bits & bit else "0")
        return "".join(chars)

    @property
    def specificity(self):
        return bin(self.mask).count("1")

    @property
    def wildcards(self):
        return self.length - self.specificity

    def matches(self, value):
        return (value ^ self.bits) & self.mask == 0

    def is_more_general(self, other):
        """Strictly more general: every situation `other` matches, this matches too."""
        return (
            self.mask & other.mask == self.mask
            and self.mask != other.mask
            and (self.bits ^ other.bits) & self.mask == 0
        )

    def crossover(self, other, rng):
        """Two-point crossover; returns both children."""
        first, second = sorted(int(i) for i in rng.integers(0, self.length + 1, size=2))
        span = 0
        for i in range(first, second):
            span |= 1 << (self.length - 1 - i)
        keep = ~span
        child_a = Condition(
            (self.bits & keep) | (other.bits & span), (self.mask & keep) | (other.mask & span), self.length
        )
        child_b = Condition(
            (other.bits & keep) | (self.bits & span), (other.mask & keep) | (self.mask & span), self.length
        )
        return child_a, child_b

    def mutate(self, situation_value, probability, rng):
        """Niche mutation: a flipped position becomes wildcard or the situation's bit."""
        bits, mask = self.bits, self.mask
        for i in range(self.length):
            if rng.random() >= probability:
                continue
            bit = 1 << (self.length - 1 - i)
            if mask & bit:
                mask &= ~bit
            else:
                mask |= bit
                bits = (bits & ~bit) | (situation_value & bit)
        return Condition(bits, mask, self.length)
