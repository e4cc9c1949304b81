import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from apps.context.concepts import AffectSnapshot
from apps.melody.encoding import activation_bin, encode_environment
from apps.melody.exceptions import EncodingError
from apps.xcs.classifier import XcsParams
from apps.xcs.conditions import Condition, situation_bits
from apps.xcs.exceptions import XcsError
from apps.xcs.population import EXPLOIT, EXPLORE, Population, prediction_array
from apps.xcs.storage import dump_population, load_population, save_population

SITUATION = "001100010010000101"


def test_environment_encoding():
    snapshot = AffectSnapshot(excitement=80, sadness=30, threat=60)
    assert encode_environment(snapshot, 5) == SITUATION


@pytest.mark.parametrize("level,expected", [(0, 0), (24.9, 0), (25, 1), (50, 2), (74.9, 2), (75, 3), (100, 3)])
def test_activation_bins(level, expected):
    assert activation_bin(level) == expected


def test_encoding_errors():
    with pytest.raises(EncodingError):
        activation_bin(100.5)
    with pytest.raises(EncodingError):
        encode_environment(AffectSnapshot(), 64)


def test_ternary_conditions():
    condition = Condition.parse("1#0")
    assert str(condition) == "1#0"
    assert condition.matches(situation_bits("100"))
    assert condition.matches(situation_bits("110"))
    assert not condition.matches(situation_bits("111"))
    assert Condition.parse("1##").is_more_general(condition)
    assert not condition.is_more_general(Condition.parse("1##"))
    assert not condition.is_more_general(condition)
    with pytest.raises(XcsError):
        Condition.parse("1x0")


def test_covering_fills_every_action():
    population = Population()
    rng = np.random.default_rng(0)
    match_set = population.match_set(SITUATION, rng)
    assert sorted(cl.action for cl in match_set) == list(range(8))
    assert len(population) == 8
    assert population.match_set(SITUATION, rng) == match_set


def test_situation_length_is_checked():
    with pytest.raises(XcsError):
        Population().match_set("0101", np.random.default_rng(0))


def test_first_update_takes_the_clamped_reward():
    population = Population()
    rng = np.random.default_rng(0)
    action_set = population.action_set(population.match_set(SITUATION, rng), 3)
    population.update(action_set, 5.0, SITUATION, rng)
    assert action_set[0].prediction == pytest.approx(1.2)
    assert action_set[0].experience == 1


def test_learns_the_best_operator():
    """Reward 0.1 * operator index; exploit must end up on operator 7."""
    population = Population(XcsParams(explore_probability=1.0))
    rng = np.random.default_rng(42)
    for _ in range(3000):
        match_set = population.match_set(SITUATION, rng)
        choice = population.select_action(match_set, EXPLORE, rng)
        population.update(population.action_set(match_set, choice.action), 0.1 * choice.action, SITUATION, rng)
    match_set = population.match_set(SITUATION, rng)
    choice = population.select_action(match_set, EXPLOIT, rng)
    assert choice.action == 7
    assert not choice.explored
    assert choice.prediction == pytest.approx(0.7, abs=0.05)
    assert prediction_array(match_set)[0] == pytest.approx(0.0, abs=0.05)


def test_population_cap_holds():
    population = Population(XcsParams(population_size=8, wildcard_probability=0.0))
    rng = np.random.default_rng(1)
    population.match_set(SITUATION, rng)
    population.match_set("1" * 18, rng)
    assert population.numerosity <= 8


def test_unknown_selection_mode():
    population = Population()
    rng = np.random.default_rng(0)
    with pytest.raises(XcsError):
        population.select_action(population.match_set(SITUATION, rng), "greedy", rng)


def test_params_are_validated():
    with pytest.raises(XcsError):
        XcsParams(learning_rate=2.0)
    with pytest.raises(XcsError):
        XcsParams(min_actions=0)


def test_population_file_round_trip(tmp_path):
    population = Population()
    rng = np.random.default_rng(3)
    for action in range(8):
        match_set = population.match_set(SITUATION, rng)
        population.update(population.action_set(match_set, action), 0.1 * action, SITUATION, rng)
    path = tmp_path / "agent_1.amsx"
    save_population(population, path)
    restored = load_population(path)
    assert dump_population(restored) == dump_population(population)
    assert restored.time == population.time


def test_corrupt_population_file(tmp_path):
    path = tmp_path / "agent_1.amsx"
    path.write_bytes(b"AMSC\x00\x01\x00\x12\x00\x00\x00\x00")
    with pytest.raises(XcsError):
        load_population(path)


def test_covering_round_may_exceed_a_small_cap():
    population = Population(XcsParams(population_size=4))
    rng = np.random.default_rng(0)
    match_set = population.match_set("0" * 18, rng)
    assert sorted(cl.action for cl in match_set) == list(range(8))
    assert population.numerosity == 8
    population.update(population.action_set(match_set, 2), 0.5, "0" * 18, rng)
    assert population.numerosity <= 4


LEVEL_IN_BIN = st.tuples(st.integers(0, 3), st.floats(0, 24.99)).map(lambda bo: bo[0] * 25 + bo[1])


@given(
    a=st.tuples(st.lists(LEVEL_IN_BIN, min_size=6, max_size=6), st.integers(0, 63)),
    b=st.tuples(st.lists(LEVEL_IN_BIN, min_size=6, max_size=6), st.integers(0, 63)),
)
def test_encoding_separates_distinct_situations(a, b):
    def encoded(levels, theme):
        return encode_environment(AffectSnapshot(*levels), theme)

    def bins(levels, theme):
        return tuple(activation_bin(v) for v in levels), theme

    assert len(encoded(*a)) == 18
    assert (encoded(*a) == encoded(*b)) == (bins(*a) == bins(*b))


@given(levels=st.lists(LEVEL_IN_BIN, min_size=6, max_size=6), theme=st.integers(0, 63))
def test_encoding_reads_back(levels, theme):
    situation = encode_environment(AffectSnapshot(*levels), theme)
    pairs = [int(situation[i:i + 2], 2) for i in range(0, 12, 2)]
    assert pairs == [activation_bin(v) for v in levels]
    assert int(situation[12:], 2) == theme


@settings(max_examples=25)
@given(
    seed=st.integers(0, 2**32 - 1),
    cap=st.integers(1, 40),
    situations=st.lists(st.text("01", min_size=18, max_size=18), min_size=1, max_size=6),
)
def test_population_cap_holds_after_every_update(seed, cap, situations):
    population = Population(XcsParams(population_size=cap, ga_threshold=0))
    rng = np.random.default_rng(seed)
    for step in range(60):
        situation = situations[step % len(situations)]
        match_set = population.match_set(situation, rng)
        if cap >= 8:
            assert population.numerosity <= cap
        choice = population.select_action(match_set, EXPLORE, rng)
        action_set = population.action_set(match_set, choice.action)
        population.update(action_set, rng.random(), situation, rng)
        assert population.numerosity <= cap


@pytest.mark.slow
def test_exploit_keeps_choosing_the_best_operator():
    """After training, 1000 consecutive exploit steps (still learning) all pick operator 7."""
    population = Population(XcsParams(explore_probability=1.0))
    rng = np.random.default_rng(42)
    for _ in range(3000):
        match_set = population.match_set(SITUATION, rng)
        choice = population.select_action(match_set, EXPLORE, rng)
        population.update(population.action_set(match_set, choice.action), 0.1 * choice.action, SITUATION, rng)
    chosen = []
    for _ in range(1000):
        match_set = population.match_set(SITUATION, rng)
        choice = population.select_action(match_set, EXPLOIT, rng)
        population.update(population.action_set(match_set, choice.action), 0.1 * choice.action, SITUATION, rng)
        chosen.append(choice.action)
    assert chosen == [7] * 1000
