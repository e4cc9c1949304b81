import numpy as np
import pytest
from hypothesis import given, strategies as st

from apps.harmony.chords import ChordSymbol
from apps.harmony.context import Placement, ResourceMatrix
from apps.harmony.exceptions import MatrixError
from apps.melody.notes import MelodicFragment, Note

C, C_SHARP, D, E, F_SHARP, G, B = 0, 1, 2, 4, 6, 7, 11


def phrase(*notes):
    return MelodicFragment(tuple(Note(*n) for n in notes), 1920)


def c_major_region():
    return ResourceMatrix().extend([(ChordSymbol.parse("C"), 2)])


def test_fresh_matrix_holds_the_initial_value():
    matrix = ResourceMatrix()
    assert matrix.cells.shape == (12, 64)
    assert np.all(matrix.cells == 0.3)
    assert matrix.region_start == 32


def test_extend_writes_root_and_chord_tones():
    matrix = c_major_region()
    region = matrix.cells[:, matrix.region_start:]
    assert np.all(region[C] == 1.0)
    assert np.all(region[E] == 0.8)
    assert np.all(region[G] == 0.8)
    assert np.all(region[D] == 0.3)
    assert matrix.labels[-1] == "C:maj"


def test_previous_chord_carries_over_capped():
    matrix = ResourceMatrix().extend([(ChordSymbol.parse("C7"), 1), (ChordSymbol.parse("E7"), 1)])
    e7_start = matrix.region_start + matrix.cells_per_measure
    assert matrix.cells[C, e7_start] == 0.5
    assert matrix.cells[E, e7_start] == 1.0
    assert matrix.cells[D, e7_start] == 0.8
    assert matrix.cells[C, e7_start - 1] == 1.0


def test_carry_over_region_has_no_new_chord():
    matrix = c_major_region().carry_over()
    region = matrix.cells[:, matrix.region_start:]
    assert np.all(region[C] == 0.5)
    assert np.all(region[D] == 0.3)
    assert matrix.labels[-1] is None


def test_extend_shifts_the_window_by_two_measures():
    first = c_major_region()
    second = first.extend([(ChordSymbol.parse("G"), 2)])
    assert np.array_equal(second.cells[:, :32], first.cells[:, 32:])


@pytest.mark.parametrize(
    "chords",
    [
        [],
        [(ChordSymbol.parse("C"), 1)],
        [(ChordSymbol.parse("C"), 1), (ChordSymbol.parse("G"), 1), (ChordSymbol.parse("F"), 1)],
        [("not-a-chord", 2)],
    ],
)
def test_extend_rejects_bad_chord_lists(chords):
    with pytest.raises(MatrixError):
        ResourceMatrix().extend(chords)


def test_harmonic_fitness_is_the_mean_inhabited_cell():
    matrix = c_major_region()
    assert matrix.harmonic_fitness(Placement(phrase((60, 0, 480)), 0, 0)) == 1.0
    assert matrix.harmonic_fitness(Placement(phrase((64, 0, 480)), 0, 0)) == 0.8
    mixed = phrase((60, 0, 480), (61, 480, 480))
    assert matrix.harmonic_fitness(Placement(mixed, 0, 0)) == pytest.approx(0.65)
    # transposing the C# down a semitone lands both notes on C
    assert matrix.harmonic_fitness(Placement(phrase((61, 0, 480)), -1, 0)) == 1.0


def test_partial_cells_count_as_inhabited():
    matrix = c_major_region()
    rows, cols = matrix.cell_indices(Placement(phrase((60, 60, 130)), 0, 2))
    assert cols.tolist() == [34, 35]
    assert rows.tolist() == [C, C]


def test_placement_outside_the_window_fails():
    matrix = c_major_region()
    with pytest.raises(MatrixError):
        matrix.cell_indices(Placement(phrase((60, 0, 480)), 0, 30))


def test_consume_zeroes_used_cells_and_halves_neighbours():
    matrix = c_major_region()
    placement = Placement(phrase((60, 0, 480)), 0, 0)
    used = matrix.consume(placement)
    start = matrix.region_start
    assert np.all(used.cells[C, start:start + 4] == 0.0)
    assert np.all(used.cells[C_SHARP, start:start + 4] == 0.15)
    assert np.all(used.cells[B, start:start + 4] == 0.15)
    assert np.all(used.cells[F_SHARP, start:start + 4] == 0.15)
    assert used.cells[C, start + 4] == 1.0
    assert matrix.cells[C, start] == 1.0


def test_csv_dump_has_a_row_per_pitch_class():
    lines = c_major_region().to_csv().splitlines()
    assert len(lines) == 13
    assert lines[1].startswith("C,")


# --------------------------------------------------------------- properties

NOTES_IN_A_BAR = st.lists(
    st.tuples(st.integers(0, 115), st.integers(0, 1440), st.integers(1, 480)), min_size=1, max_size=10
)


def random_region(seed):
    return ResourceMatrix(cells=np.random.default_rng(seed).uniform(0.0, 1.0, size=(12, 64)))


def mean_cell_by_hand(matrix, notes, transposition, shift):
    values = []
    for pitch, onset, duration in notes:
        for c in range(onset // 120, -(-(onset + duration) // 120)):
            values.append(matrix.cells[(pitch + transposition) % 12, matrix.region_start + shift + c])
    return sum(values) / len(values)


@given(
    notes=NOTES_IN_A_BAR,
    seed=st.integers(0, 2**32 - 1),
    transposition=st.integers(-24, 24),
    shift=st.integers(0, 16),
)
def test_harmonic_fitness_matches_a_cell_by_cell_mean(notes, seed, transposition, shift):
    matrix = random_region(seed)
    h = matrix.harmonic_fitness(Placement(phrase(*notes), transposition, shift))
    assert h == pytest.approx(mean_cell_by_hand(matrix, notes, transposition, shift))
    assert 0.0 <= h <= 1.0


@given(notes=NOTES_IN_A_BAR, seed=st.integers(0, 2**32 - 1), shift=st.integers(0, 16))
def test_harmonic_fitness_ignores_octaves(notes, seed, shift):
    matrix = random_region(seed)
    melody = phrase(*notes)
    h = matrix.harmonic_fitness(Placement(melody, 0, shift))
    assert matrix.harmonic_fitness(Placement(melody, 12, shift)) == h
    assert matrix.harmonic_fitness(Placement(melody, -12, shift)) == h
    assert matrix.harmonic_fitness(Placement(melody.transpose(12), 0, shift)) == h


@given(notes=NOTES_IN_A_BAR, seed=st.integers(0, 2**32 - 1), shift=st.integers(0, 16))
def test_consume_only_lowers_cells(notes, seed, shift):
    matrix = random_region(seed)
    placement = Placement(phrase(*notes), 0, shift)
    used = matrix.consume(placement)
    assert np.all(used.cells <= matrix.cells)
    assert np.all((used.cells >= 0.0) & (used.cells <= 1.0))
    rows, cols = matrix.cell_indices(placement)
    assert np.all(used.cells[rows, cols] == 0.0)
    assert used.labels == matrix.labels
