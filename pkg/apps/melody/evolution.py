import math
from dataclasses import replace

from .exceptions import MelodyError, OperatorError
from .notes import MelodicFragment, measure_ticks
from .operators import MelodyOperator, apply_operator

MAX_MEASURES = 4
PITCH_STEPS = (-4, -3, -2, -1, 1, 2, 3, 4)


def mutate_notes(notes, rng, rate):
    """Per-note single point mutation of pitch or rhythm. Returns (notes, mutated count)."""
    out, mutated = [], 0
    for n in notes:
        if rng.random() >= rate:
            out.append(n)
            continue
        mutated += 1
        if rng.random() < 0.5:
            step = PITCH_STEPS[int(rng.integers(len(PITCH_STEPS)))]
            out.append(replace(n, pitch=min(127, max(0, n.pitch + step))))
        elif rng.random() < 0.5:
            out.append(replace(n, duration=n.duration * 2))
        else:
            out.append(replace(n, duration=max(1, n.duration // 2)))
    return out, mutated


def _monophonic(notes):
    notes = sorted(notes, key=lambda n: (n.onset, n.pitch))
    out = []
    for n in notes:
        if out and out[-1].onset == n.onset:
            continue
        if out and out[-1].end > n.onset:
            out[-1] = replace(out[-1], duration=n.onset - out[-1].onset)
        out.append(n)
    return out


def parent_pool(parent_a, parent_b, operators=tuple(MelodyOperator)):
    pool = [parent_a, parent_b]
    for parent in (parent_a, parent_b):
        for op in operators:
            try:
                pool.append(apply_operator(parent, op))
            except OperatorError:
                continue
    return pool


def evolve_theme(
    parent_a,
    parent_b,
    rng,
    mutation_rate=0.1,
    operators=tuple(MelodyOperator),
    beats_per_measure=4,
):
    """
    Splices two members of the operator-expanded parent pool at a measure
    boundary, mutates, and trims the child to one to four measures.
    """
    if not parent_a.notes or not parent_b.notes:
        raise MelodyError("theme evolution needs two non-empty parents")
    bar = measure_ticks(beats_per_measure)
    pool = parent_pool(parent_a, parent_b, operators)
    head = pool[int(rng.integers(len(pool)))]
    tail = pool[int(rng.integers(len(pool)))]

    boundaries = min(head.length_ticks, tail.length_ticks) // bar
    cut = int(rng.integers(boundaries + 1)) * bar
    spliced = [n for n in head.notes if n.onset < cut] + [n for n in tail.notes if n.onset >= cut]
    if not spliced:
        spliced = list(tail.notes)

    notes, _ = mutate_notes(spliced, rng, mutation_rate)
    notes = _monophonic(notes)
    span = max(cut, tail.length_ticks, max(n.end for n in notes))
    measures = min(MAX_MEASURES, max(1, math.ceil(span / bar)))
    child = MelodicFragment(
        tuple(notes),
        measures * bar,
        key=head.key if cut else tail.key,
    )
    return child.truncated(measures * bar)
