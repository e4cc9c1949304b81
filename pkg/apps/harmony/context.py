import io
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from apps.melody.notes import BEATS_PER_MEASURE, TICKS_PER_BEAT
from .chords import PITCH_NAMES, ChordSymbol
from .exceptions import MatrixError

INITIAL_VALUE = 0.3
ROOT_VALUE = 1.0
CHORD_TONE_VALUE = 0.8
CARRY_CAP = 0.5
CELLS_PER_BEAT = 4
WINDOW_MEASURES = 4
SLIDE_MEASURES = 2


@dataclass(frozen=True)
class Placement:
    fragment: object
    transposition: int
    time_shift: int


class ResourceMatrix:
    """
    12 x T harmonic resource grid, rows C..B, 4 cells per beat.

    The last SLIDE_MEASURES of the window are the region currently being
    composed; `Placement.time_shift` counts cells from the region start.
    Instances are never mutated in place: extend/consume return new ones.
    """

    def __init__(self, beats_per_measure=BEATS_PER_MEASURE, cells=None, labels=None):
        self.beats_per_measure = beats_per_measure
        self.cells_per_measure = beats_per_measure * CELLS_PER_BEAT
        self.ticks_per_cell = TICKS_PER_BEAT // CELLS_PER_BEAT
        width = WINDOW_MEASURES * self.cells_per_measure
        if cells is None:
            cells = np.full((12, width), INITIAL_VALUE)
        if cells.shape != (12, width):
            raise MatrixError(f"expected a 12x{width} grid, got {cells.shape}")
        self.cells = cells
        self.labels = list(labels) if labels is not None else [None] * width

    @property
    def width(self):
        return self.cells.shape[1]

    @property
    def region_cells(self):
        return SLIDE_MEASURES * self.cells_per_measure

    @property
    def region_start(self):
        return self.width - self.region_cells

    def _derive(self, cells, labels=None):
        return ResourceMatrix(self.beats_per_measure, cells, labels if labels is not None else self.labels)

    def copy(self):
        return self._derive(self.cells.copy(), list(self.labels))

    def extend(self, chords):
        """Slides the window by two measures and lays out `chords` as (symbol, measures) pairs."""
        if not chords:
            raise MatrixError("cannot extend with an empty chord list")
        spans = []
        for chord, measures in chords:
            if isinstance(chord, str):
                try:
                    chord = ChordSymbol.from_token(chord)
                except ValueError as exc:
                    raise MatrixError(str(exc)) from None
            if not isinstance(chord, ChordSymbol):
                raise MatrixError(f"not a chord symbol: {chord!r}")
            n = Fraction(measures).limit_denominator(64) * self.cells_per_measure
            if n.denominator != 1 or n <= 0:
                raise MatrixError(f"{chord} lasts {measures} measures, not a whole number of cells")
            spans.append((chord, int(n)))
        if sum(n for _, n in spans) != self.region_cells:
            raise MatrixError("chords must cover exactly the next two measures")

        new = np.empty((12, self.region_cells))
        labels = []
        previous = self.cells[:, -1]
        col = 0
        for chord, n in spans:
            for _ in range(n):
                column = np.clip(previous, 0.0, CARRY_CAP)
                column[list(chord.pitch_classes)] = CHORD_TONE_VALUE
                column[chord.root] = ROOT_VALUE
                new[:, col] = column
                previous = column
                col += 1
            labels.extend([chord.token] * n)
        cells = np.concatenate([self.cells[:, self.region_cells:], new], axis=1)
        return self._derive(cells, self.labels[self.region_cells:] + labels)

    def carry_over(self):
        """The next region with no new chord: prior harmony clamped to the carry cap."""
        column = np.clip(self.cells[:, -1], 0.0, CARRY_CAP)
        new = np.repeat(column[:, None], self.region_cells, axis=1)
        cells = np.concatenate([self.cells[:, self.region_cells:], new], axis=1)
        return self._derive(cells, self.labels[self.region_cells:] + [None] * self.region_cells)

    # ----------------------------------------------------------- note lookup

    def cell_indices(self, placement):
        """(rows, cols) of every cell inhabited by the placed notes, one entry per note-cell."""
        rows, cols = [], []
        origin = self.region_start + placement.time_shift
        for note in placement.fragment.notes:
            first = note.onset // self.ticks_per_cell
            last = math.ceil(note.end / self.ticks_per_cell)
            pc = (note.pitch + placement.transposition) % 12
            for c in range(origin + first, origin + last):
                rows.append(pc)
                cols.append(c)
        if not rows:
            raise MatrixError("placement inhabits no cells")
        rows, cols = np.asarray(rows), np.asarray(cols)
        if cols.min() < 0 or cols.max() >= self.width:
            raise MatrixError("placement falls outside the matrix window")
        return rows, cols

    def harmonic_fitness(self, placement):
        rows, cols = self.cell_indices(placement)
        return float(fitness_for_shifts(self.cells, rows, cols, np.zeros(1, dtype=int))[0])

    def consume(self, placement):
        rows, cols = self.cell_indices(placement)
        cells = self.cells.copy()
        for pc, c in zip(rows.tolist(), cols.tolist()):
            cells[pc, c] = 0.0
            for neighbour in ((pc - 1) % 12, (pc + 1) % 12, (pc + 6) % 12):
                cells[neighbour, c] *= 0.5
        return self._derive(cells)

    def to_csv(self):
        buffer = io.StringIO()
        buffer.write("pitch," + ",".join(f"c{i}" for i in range(self.width)) + "\n")
        for pc in range(12):
            buffer.write(PITCH_NAMES[pc] + "," + ",".join(f"{v:.4f}" for v in self.cells[pc]) + "\n")
        return buffer.getvalue()


def fitness_for_shifts(cells, rows, cols, shifts):
    """Mean inhabited-cell value for each column shift; shared by scoring and search."""
    values = cells[rows[:, None], cols[:, None] + shifts[None, :]]
    # fsum is order independent, so a single placement scores exactly as it does in a batch
    return np.array([math.fsum(column) for column in values.T.tolist()]) / len(rows)
