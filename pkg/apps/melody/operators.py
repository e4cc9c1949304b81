from dataclasses import replace
from enum import IntEnum

from .exceptions import OperatorError
from .notes import MelodicFragment


class MelodyOperator(IntEnum):
    REVERSE = 0
    DIMINISH = 1
    AUGMENT = 2
    INVERT = 3
    REVERSE_DIMINISH = 4
    REVERSE_AUGMENT = 5
    INVERT_DIMINISH = 6
    INVERT_AUGMENT = 7

    @property
    def label(self):
        return "".join(part.capitalize() for part in self.name.split("_"))


def reverse(fragment):
    span = max(fragment.length_ticks, fragment.end)
    notes = tuple(replace(n, onset=span - n.end) for n in fragment.notes)
    return replace(fragment, notes=notes, length_ticks=span)


def augment(fragment, factor=2):
    notes = tuple(replace(n, onset=n.onset * factor, duration=n.duration * factor) for n in fragment.notes)
    return replace(fragment, notes=notes, length_ticks=fragment.length_ticks * factor)


def diminish(fragment):
    if any(n.duration < 2 for n in fragment.notes):
        raise OperatorError("diminution would leave a note shorter than one tick")
    notes = tuple(replace(n, onset=n.onset // 2, duration=n.duration // 2) for n in fragment.notes)
    return replace(fragment, notes=notes, length_ticks=max(1, fragment.length_ticks // 2))


def invert(fragment):
    """Mirrors every pitch around the first note's pitch."""
    axis = fragment.notes[0].pitch
    clamped = fragment.clamped
    notes = []
    for n in fragment.notes:
        pitch = 2 * axis - n.pitch
        if not 0 <= pitch <= 127:
            pitch = min(127, max(0, pitch))
            clamped = True
        notes.append(replace(n, pitch=pitch))
    return replace(fragment, notes=tuple(notes), clamped=clamped)


# compound operators apply right to left
_STEPS = {
    MelodyOperator.REVERSE: (reverse,),
    MelodyOperator.DIMINISH: (diminish,),
    MelodyOperator.AUGMENT: (augment,),
    MelodyOperator.INVERT: (invert,),
    MelodyOperator.REVERSE_DIMINISH: (reverse, diminish),
    MelodyOperator.REVERSE_AUGMENT: (reverse, augment),
    MelodyOperator.INVERT_DIMINISH: (invert, diminish),
    MelodyOperator.INVERT_AUGMENT: (invert, augment),
}


def apply_operator(fragment: MelodicFragment, op) -> MelodicFragment:
    if not fragment.notes:
        raise OperatorError("cannot transform an empty fragment")
    for step in reversed(_STEPS[MelodyOperator(op)]):
        fragment = step(fragment)
    return fragment
