"""
Phrase proposal: XCS picks an operator, the transformed theme is then
placed by exhaustive search over transpositions and cell shifts.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from apps.harmony.chords import Style
from apps.harmony.context import Placement, fitness_for_shifts
from apps.xcs.population import EXPLORE
from .encoding import encode_environment
from .exceptions import OperatorError
from .operators import MelodyOperator, apply_operator
from .reward import extract_features, style_score

logger = logging.getLogger(__name__)

TRANSPOSITION_BOUND = 24


@dataclass(frozen=True)
class RangeConstraint:
    low: int = 0
    high: int = 127

    def admits(self, lowest, highest):
        return self.low <= lowest and highest <= self.high

    @property
    def empty(self):
        return self.low > self.high


@dataclass(frozen=True)
class PlacementChoice:
    placement: Placement
    harmonic_fitness: float
    style_score: float

    @property
    def score(self):
        return self.harmonic_fitness + self.style_score


@dataclass(frozen=True)
class Decision:
    """Outcome of XCS action selection for one agent and one cycle."""

    situation: str
    operator: MelodyOperator
    estimated_reward: float
    explored: bool
    action_set: list
    candidate: object  # transformed theme, or None when the operator failed
    gated: bool


@dataclass(frozen=True)
class Proposal:
    decision: Decision
    choice: PlacementChoice

    @property
    def placement(self):
        return self.choice.placement

    @property
    def action_set(self):
        return self.decision.action_set

    @property
    def estimated_reward(self):
        return self.decision.estimated_reward


@dataclass(frozen=True)
class Abstention:
    decision: Decision
    reason: str


def transposition_order(bound):
    return sorted(range(-bound, bound + 1), key=lambda t: (abs(t), t))


def best_placement(
    fragment,
    matrix,
    style,
    agent_count,
    constraint,
    h_min,
    tempo_bpm,
    transposition_bound=TRANSPOSITION_BOUND,
):
    """
    Highest M = H + P placement of `fragment` inside the matrix region with
    H >= h_min. Ties keep the smaller |transposition|, then the earlier shift.
    Returns None when nothing qualifies.
    """
    if not fragment.notes or constraint.empty:
        return None
    tpc = matrix.ticks_per_cell
    fragment = fragment.truncated(matrix.region_cells * tpc)
    if not fragment.notes:
        return None
    span = max(1, math.ceil(max(fragment.length_ticks, fragment.end) / tpc))
    shifts = np.arange(matrix.region_cells - span + 1)
    if len(shifts) == 0:
        return None

    if Style(style) is Style.JAZZ:
        # only the off-beat term depends on the shift
        style_scores = np.array(
            [
                style_score(extract_features(fragment, tempo_bpm, int(s) * tpc), style, agent_count)
                for s in shifts
            ]
        )
    else:
        p = style_score(extract_features(fragment, tempo_bpm), style, agent_count)
        style_scores = np.full(len(shifts), p)
    base_rows, cols = matrix.cell_indices(Placement(fragment, 0, 0))
    lowest, highest = fragment.lowest, fragment.highest

    best = None
    for t in transposition_order(transposition_bound):
        lo, hi = lowest + t, highest + t
        if lo < 0 or hi > 127 or not constraint.admits(lo, hi):
            continue
        rows = (base_rows + t) % 12
        h = fitness_for_shifts(matrix.cells, rows, cols, shifts)
        m = h + style_scores
        for i in np.flatnonzero(h >= h_min):
            if best is None or m[i] > best.score:
                best = PlacementChoice(
                    Placement(fragment, t, int(shifts[i])), float(h[i]), float(style_scores[i])
                )
    return best


def decide(population, theme, snapshot, mode, rng, reward_gate):
    """Match, select an operator and apply it; `gated` is set when the estimate is too low."""
    situation = encode_environment(snapshot, theme.theme_id)
    match_set = population.match_set(situation, rng)
    choice = population.select_action(match_set, mode, rng)
    action_set = population.action_set(match_set, choice.action)
    operator = MelodyOperator(choice.action)
    try:
        candidate = apply_operator(theme.fragment, operator)
    except OperatorError as exc:
        logger.debug("operator %s failed on theme %d: %s", operator.label, theme.theme_id, exc)
        candidate = None
    untried = all(cl.experience == 0 for cl in action_set)
    gated = choice.prediction <= reward_gate and not choice.explored and not untried
    return Decision(
        situation=situation,
        operator=operator,
        estimated_reward=choice.prediction,
        explored=choice.explored,
        action_set=action_set,
        candidate=candidate,
        gated=gated,
    )


def place(decision, matrix, style, agent_count, constraint, h_min, tempo_bpm, transposition_bound):
    if decision.gated:
        return Abstention(decision, "below-gate")
    if decision.candidate is None:
        return Abstention(decision, "operator-failed")
    choice = best_placement(
        decision.candidate,
        matrix,
        style,
        agent_count,
        constraint,
        h_min,
        tempo_bpm,
        transposition_bound,
    )
    if choice is None:
        return Abstention(decision, "no-placement")
    return Proposal(decision, choice)


def propose_phrase(agent, theme, snapshot, matrix, style, range_constraint, mode=EXPLORE):
    """Returns a Proposal, or an Abstention saying why the agent stays silent."""
    decision = agent.decide(theme, snapshot, mode)
    return agent.place(decision, matrix, style, range_constraint)
