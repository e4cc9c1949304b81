import logging
from dataclasses import dataclass

import numpy as np

from apps.xcs.population import Population
from .reward import realize_reward
from .search import TRANSPOSITION_BOUND, RangeConstraint, decide, place

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AgentSettings:
    tempo_bpm: float = 120.0
    agent_count: int = 1
    reward_gate: float = 0.6
    h_min: float = 0.5
    transposition_bound: int = TRANSPOSITION_BOUND
    normalize_happiness: bool = True


class MelodyAgent:
    def __init__(self, agent_id, population=None, settings=None, register=(0, 127), program=0, seed=0):
        self.agent_id = agent_id
        self.population = population or Population()
        self.settings = settings or AgentSettings()
        self.register = RangeConstraint(*register)
        self.program = program
        self.rng = np.random.default_rng(seed)

    def __repr__(self):
        return f"MelodyAgent({self.agent_id}, register={self.register.low}-{self.register.high})"

    def decide(self, theme, snapshot, mode):
        return decide(self.population, theme, snapshot, mode, self.rng, self.settings.reward_gate)

    def place(self, decision, matrix, style, constraint, h_min=None):
        s = self.settings
        return place(
            decision,
            matrix,
            style,
            s.agent_count,
            constraint,
            s.h_min if h_min is None else h_min,
            s.tempo_bpm,
            s.transposition_bound,
        )

    def realized_fragment(self, placement):
        return placement.fragment.transpose(placement.transposition)

    def learn(self, proposal, snapshot, ticks_per_cell):
        """Scores the committed phrase and feeds the reward back into the action set."""
        placement = proposal.placement
        r = realize_reward(
            snapshot,
            self.realized_fragment(placement),
            self.settings.tempo_bpm,
            onset_offset=placement.time_shift * ticks_per_cell,
            normalize_happiness=self.settings.normalize_happiness,
        )
        self.population.update(proposal.action_set, r, proposal.decision.situation, self.rng)
        logger.debug("agent %d learned R=%.4f for %s", self.agent_id, r, proposal.decision.operator.label)
        return r
