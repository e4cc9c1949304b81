import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from apps.context.concepts import AffectSnapshot
from apps.harmony.chords import ChordSymbol, Style
from apps.harmony.context import Placement, ResourceMatrix
from apps.melody.agent import AgentSettings, MelodyAgent
from apps.melody.evolution import evolve_theme, mutate_notes
from apps.melody.exceptions import MelodyError, OperatorError, ThemeFormatError
from apps.melody.notes import Key, MelodicFragment, Note
from apps.melody.operators import MelodyOperator, apply_operator, augment, diminish, invert, reverse
from apps.melody.reward import extract_features, max_range, reward, reward_breakdown, style_score
from apps.melody.search import Abstention, Proposal, RangeConstraint, best_placement, place, propose_phrase
from apps.melody.themes import Theme, ThemeLibrary, parse_theme
from apps.xcs.population import EXPLOIT

BAR = 1920


def fragment(*notes, length=BAR, key=Key()):
    return MelodicFragment(tuple(Note(*n) for n in notes), length, key=key)


SCALE_RUN = fragment((60, 0, 480), (62, 480, 480), (64, 960, 480), (65, 1440, 480))


def c_major_region():
    return ResourceMatrix().extend([(ChordSymbol.parse("C"), 2)])


# --------------------------------------------------------------- operators


def test_operator_labels():
    assert MelodyOperator.INVERT_AUGMENT.label == "InvertAugment"
    assert [op.value for op in MelodyOperator] == list(range(8))


def test_reverse_and_invert_are_involutions():
    assert reverse(reverse(SCALE_RUN)) == SCALE_RUN
    assert invert(invert(SCALE_RUN)) == SCALE_RUN


def test_augment_undoes_diminish():
    assert augment(diminish(SCALE_RUN)) == SCALE_RUN
    assert augment(SCALE_RUN).length_ticks == 2 * BAR


def test_reverse_mirrors_onsets():
    reversed_run = reverse(SCALE_RUN)
    assert [n.pitch for n in reversed_run.notes] == [65, 64, 62, 60]
    assert reversed_run.notes[0].onset == 0


def test_invert_mirrors_around_the_first_pitch():
    assert [n.pitch for n in invert(SCALE_RUN).notes] == [60, 58, 56, 55]


def test_invert_clamps_and_flags():
    inverted = invert(fragment((10, 0, 480), (120, 480, 480)))
    assert inverted.notes[1].pitch == 0
    assert inverted.clamped


def test_compound_operators_apply_right_to_left():
    assert apply_operator(SCALE_RUN, MelodyOperator.INVERT_AUGMENT) == invert(augment(SCALE_RUN))
    assert apply_operator(SCALE_RUN, MelodyOperator.REVERSE_DIMINISH) == reverse(diminish(SCALE_RUN))


def test_operator_failures():
    with pytest.raises(OperatorError):
        diminish(fragment((60, 0, 1)))
    with pytest.raises(OperatorError):
        apply_operator(MelodicFragment((), BAR), MelodyOperator.REVERSE)


def test_operators_keep_interval_sizes():
    steps = [abs(b.pitch - a.pitch) for a, b in zip(SCALE_RUN.notes, SCALE_RUN.notes[1:])]
    for op in MelodyOperator:
        out = apply_operator(SCALE_RUN, op)
        out_steps = [abs(b.pitch - a.pitch) for a, b in zip(out.notes, out.notes[1:])]
        assert sorted(out_steps) == sorted(steps)


# ------------------------------------------------------------------ reward


def test_features_of_a_scale_run():
    features = extract_features(SCALE_RUN, 120)
    assert features.notes_per_second == 2.0
    assert features.mean_interval == pytest.approx(5 / 3)
    assert features.diatonic_fraction == 1.0
    assert features.notes_per_beat == 1.0
    assert features.off_beat == 0
    assert extract_features(SCALE_RUN, 120, onset_offset=240).off_beat == 1


def test_calm_silence_scores_point_six():
    # one off-key note every two seconds: no tempo, no leaps, nothing diatonic
    lone = extract_features(fragment((61, 0, 480)), 120)
    assert reward(AffectSnapshot(), lone) == pytest.approx(0.6)


def test_sadness_rewards_slow_phrases():
    lone = extract_features(fragment((61, 0, 480)), 120)
    assert reward_breakdown(AffectSnapshot(sadness=100), lone).sadness == pytest.approx(0.2)


def test_happiness_normalisation():
    diatonic = extract_features(fragment((60, 0, 480)), 120)
    snapshot = AffectSnapshot(happiness=100)
    assert reward_breakdown(snapshot, diatonic).happiness == pytest.approx(0.2)
    assert reward_breakdown(snapshot, diatonic, normalize_happiness=False).happiness == pytest.approx(-98.8)


def test_threat_rewards_wide_leaps():
    leaps = extract_features(fragment((60, 0, 480), (66, 480, 480), (60, 960, 480)), 120)
    assert reward_breakdown(AffectSnapshot(threat=100), leaps).threat == pytest.approx(0.2)


def test_style_scores():
    features = extract_features(SCALE_RUN, 120)
    assert style_score(features, Style.JAZZ, 3) == 0.0
    assert style_score(features, Style.POP, 3) == pytest.approx(2 / 3)
    assert style_score(features, Style.FOLK, 3) == 0.0
    offbeat = extract_features(SCALE_RUN, 120, onset_offset=120)
    assert style_score(offbeat, Style.JAZZ, 1) == 1.0


@pytest.mark.parametrize(
    "agents,style,expected",
    [(1, Style.JAZZ, 12), (2, Style.JAZZ, 24), (3, Style.JAZZ, 36), (4, Style.FOLK, 33), (3, Style.POP, 28)],
)
def test_max_range(agents, style, expected):
    assert max_range(agents, style) == expected


def test_max_range_needs_an_agent():
    with pytest.raises(MelodyError):
        max_range(0, Style.POP)


# --------------------------------------------------------------- placement


def test_best_placement_prefers_small_transpositions():
    choice = best_placement(fragment((60, 0, 480)), c_major_region(), Style.POP, 1, RangeConstraint(), 0.5, 120)
    assert choice.placement.transposition == 0
    assert choice.placement.time_shift == 0
    assert choice.harmonic_fitness == 1.0
    assert choice.style_score == 0.75


def test_best_placement_respects_the_register():
    choice = best_placement(
        fragment((60, 0, 480)), c_major_region(), Style.POP, 1, RangeConstraint(70, 90), 0.5, 120
    )
    assert choice.placement.transposition == 12


def test_best_placement_can_come_up_empty():
    region = c_major_region()
    run = fragment((60, 0, 480))
    assert best_placement(run, region, Style.POP, 1, RangeConstraint(80, 70), 0.5, 120) is None
    assert best_placement(run, region, Style.POP, 1, RangeConstraint(), 1.1, 120) is None


def test_long_candidates_are_cut_to_the_region():
    long_run = augment(augment(SCALE_RUN))
    choice = best_placement(long_run, c_major_region(), Style.FOLK, 1, RangeConstraint(), 0.0, 120)
    assert choice.placement.fragment.length_ticks == 2 * BAR
    assert choice.placement.time_shift == 0


def test_agent_proposes_and_learns(theme_library):
    agent = MelodyAgent(1, settings=AgentSettings(agent_count=1), seed=5)
    theme = theme_library.get(1)
    region = c_major_region()
    decision = agent.decide(theme, AffectSnapshot(), EXPLOIT)
    # a fresh population has never been tried, so the gate stays open
    assert not decision.gated
    outcome = agent.place(decision, region, Style.POP, agent.register, h_min=0.0)
    assert isinstance(outcome, Proposal)
    r = agent.learn(outcome, AffectSnapshot(), region.ticks_per_cell)
    assert all(cl.experience == 1 for cl in outcome.action_set)
    assert isinstance(r, float)


def test_gated_decision_abstains(theme_library):
    agent = MelodyAgent(1, seed=5)
    decision = agent.decide(theme_library.get(1), AffectSnapshot(), EXPLOIT)
    gated = replace(decision, gated=True)
    outcome = place(gated, c_major_region(), Style.POP, 1, RangeConstraint(), 0.5, 120, 24)
    assert isinstance(outcome, Abstention)
    assert outcome.reason == "below-gate"


# ------------------------------------------------------------------ themes


def test_bundled_themes(theme_library):
    assert [t.theme_id for t in theme_library] == list(range(8))
    assert all(t.fragment.is_monophonic() for t in theme_library)
    assert theme_library.next_free_id() == 8


def test_theme_text_round_trip(theme_library):
    theme = theme_library.get(3)
    assert parse_theme(theme.to_text()) == theme


@pytest.mark.parametrize(
    "notes",
    [
        "60 0 960 90\n62 480 480 90\n",
        "60 0 960 90\n62 1440 960 90\n",
        "60 0 960\n",
        "200 0 480 90\n",
    ],
)
def test_bad_theme_files(notes):
    text = "theme_id: 9\nname: broken\nkey: C major\nlength_measures: 1\nnotes:\n" + notes
    with pytest.raises(ThemeFormatError):
        parse_theme(text)


def test_library_rejects_duplicate_ids(theme_library):
    library = ThemeLibrary(theme_library)
    with pytest.raises(ThemeFormatError):
        library.add(Theme(3, SCALE_RUN))


# --------------------------------------------------------------- evolution


def test_evolved_theme_is_a_valid_theme(theme_library):
    a, b = theme_library.get(2), theme_library.get(5)
    child = evolve_theme(a.fragment, b.fragment, np.random.default_rng(11))
    assert child.length_ticks in (BAR, 2 * BAR, 3 * BAR, 4 * BAR)
    assert child.notes and child.is_monophonic()
    assert child.end <= child.length_ticks
    assert all(0 <= n.pitch <= 127 for n in child.notes)


def test_evolution_is_seeded(theme_library):
    a, b = theme_library.get(2), theme_library.get(5)
    first = evolve_theme(a.fragment, b.fragment, np.random.default_rng(11))
    second = evolve_theme(a.fragment, b.fragment, np.random.default_rng(11))
    assert first == second


def test_mutation_rate_zero_changes_nothing():
    notes, mutated = mutate_notes(list(SCALE_RUN.notes), np.random.default_rng(0), 0.0)
    assert notes == list(SCALE_RUN.notes)
    assert mutated == 0


# --------------------------------------------------------------- properties


@st.composite
def melodies(draw, low=50, high=77, even=False):
    """Monophonic fragments; `even` keeps every tick value divisible by two."""
    unit = 2 if even else 1
    steps = draw(
        st.lists(
            st.tuples(st.integers(low, high), st.integers(0, 120), st.integers(1, 240)), min_size=1, max_size=8
        )
    )
    notes, t = [], 0
    for pitch, gap, duration in steps:
        onset = t + gap * unit
        notes.append(Note(pitch, onset, duration * unit))
        t = onset + duration * unit
    tail = draw(st.integers(0, 240)) * unit
    return MelodicFragment(tuple(notes), t + tail)


@given(melody=melodies())
def test_reverse_and_invert_are_involutions_on_any_melody(melody):
    assert reverse(reverse(melody)) == melody
    assert invert(invert(melody)) == melody
    assert not invert(melody).clamped


@given(melody=melodies(even=True))
def test_augment_and_diminish_undo_each_other(melody):
    assert augment(diminish(melody)) == melody
    assert diminish(augment(melody)) == melody


@given(melody=melodies(low=0, high=127), op=st.sampled_from(list(MelodyOperator)))
def test_operators_keep_note_count_and_interval_sizes(melody, op):
    try:
        out = apply_operator(melody, op)
    except OperatorError:
        assert op.name.endswith("DIMINISH") and any(n.duration < 2 for n in melody.notes)
        return
    assert len(out) == len(melody)
    if not out.clamped:
        steps = sorted(abs(b.pitch - a.pitch) for a, b in zip(melody.notes, melody.notes[1:]))
        assert sorted(abs(b.pitch - a.pitch) for a, b in zip(out.notes, out.notes[1:])) == steps


def reward_by_hand(snapshot, melody, tempo_bpm):
    notes = melody.notes
    seconds = melody.length_ticks / 480 * 60 / tempo_bpm
    tempo = (len(notes) / seconds - 0.5) / 25
    leaps = [abs(b.pitch - a.pitch) for a, b in zip(notes, notes[1:])]
    mean_leap = sum(leaps) / len(leaps) if leaps else 0.0
    diatonic = sum(n.pitch % 12 in {0, 2, 4, 5, 7, 9, 11} for n in notes) / len(notes)
    return (
        0.2 - abs(snapshot.excitement / 500 - tempo)
        + 0.2 - abs(snapshot.happiness / 100 - diatonic)
        + abs(snapshot.sadness / 500 - tempo)
        + abs(snapshot.tenderness / 500 - tempo)
        + 0.2 - abs(snapshot.threat / 500 - mean_leap / 30)
    )


@given(
    melody=melodies(low=0, high=127),
    levels=st.lists(st.floats(0, 100), min_size=6, max_size=6),
    tempo=st.integers(40, 240),
)
def test_reward_matches_the_formula(melody, levels, tempo):
    snapshot = AffectSnapshot(*levels)
    assert reward(snapshot, extract_features(melody, tempo)) == pytest.approx(reward_by_hand(snapshot, melody, tempo))


def random_region(seed):
    return ResourceMatrix(cells=np.random.default_rng(seed).uniform(0.0, 1.0, size=(12, 64)))


@st.composite
def bar_melodies(draw):
    melody = draw(melodies(low=24, high=100)).truncated(BAR)
    assume(melody.notes)
    return melody


@settings(max_examples=50)
@given(
    melody=bar_melodies(),
    seed=st.integers(0, 2**32 - 1),
    h_min=st.floats(0.0, 1.0),
    low=st.integers(0, 90),
)
def test_best_placement_abstains_only_when_nothing_qualifies(melody, seed, h_min, low):
    region = random_region(seed)
    constraint = RangeConstraint(low, 127)
    bound = 3
    span = max(1, math.ceil(max(melody.length_ticks, melody.end) / region.ticks_per_cell))
    qualifying = []
    for t in range(-bound, bound + 1):
        lo, hi = melody.lowest + t, melody.highest + t
        if lo < 0 or hi > 127 or not constraint.admits(lo, hi):
            continue
        for shift in range(region.region_cells - span + 1):
            h = region.harmonic_fitness(Placement(melody, t, shift))
            if h >= h_min:
                qualifying.append(h)
    p = style_score(extract_features(melody, 120), Style.POP, 1)
    choice = best_placement(melody, region, Style.POP, 1, constraint, h_min, 120, transposition_bound=bound)
    if not qualifying:
        assert choice is None
    else:
        assert choice is not None
        assert choice.harmonic_fitness >= h_min
        assert choice.score == pytest.approx(max(qualifying) + p)


def test_propose_phrase(theme_library):
    agent = MelodyAgent(1, settings=AgentSettings(agent_count=1, h_min=0.0), seed=5)
    theme = theme_library.get(1)
    outcome = propose_phrase(agent, theme, AffectSnapshot(), c_major_region(), Style.POP, RangeConstraint())
    assert isinstance(outcome, Proposal)
    silent = propose_phrase(agent, theme, AffectSnapshot(), c_major_region(), Style.POP, RangeConstraint(80, 70))
    assert isinstance(silent, Abstention)
    assert silent.reason == "no-placement"
