import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from apps.harmony.agent import HarmonyAgent
from apps.harmony.context import ResourceMatrix
from apps.harmony.training import load_or_train
from apps.melody.agent import AgentSettings, MelodyAgent
from apps.render.score import Score
from apps.xcs.exceptions import XcsError
from apps.xcs.population import Population
from apps.xcs.storage import load_population, save_population

logger = logging.getLogger(__name__)

HISTORY_LIMIT = 64
HARMONY_CHANNEL = 8


def population_path(config, agent_id):
    return Path(config.xcs.population_dir) / f"agent_{agent_id}.amsx"


def _population(config, agent_id):
    path = population_path(config, agent_id)
    if config.xcs.persist and path.exists():
        try:
            population = load_population(path, config.xcs.params)
            logger.info("agent %d resumed %d classifiers from %s", agent_id, len(population), path)
            return population
        except XcsError as exc:
            logger.warning("ignoring population file: %s", exc)
    return Population(config.xcs.params)


def build_agents(config):
    m = config.melody
    settings = AgentSettings(
        tempo_bpm=config.engine.tempo_bpm,
        agent_count=m.agents,
        reward_gate=m.reward_gate,
        h_min=m.h_min,
        transposition_bound=m.transposition_bound,
        normalize_happiness=m.normalize_happiness,
    )
    return [
        MelodyAgent(
            agent_id=i,
            population=_population(config, i),
            settings=settings,
            register=m.register(i - 1),
            program=m.program(i - 1),
            seed=[config.engine.seed, i],
        )
        for i in range(1, m.agents + 1)
    ]


@dataclass
class ScoreState:
    """Everything the composer carries from one cycle to the next."""

    harmony: HarmonyAgent
    agents: list
    matrix: ResourceMatrix
    rng: np.random.Generator
    score: Score = field(default_factory=Score)
    chord_history: list = field(default_factory=list)
    measure_index: int = 0
    cycle_index: int = 0

    @classmethod
    def initial(cls, config, model=None):
        if model is None:
            model = load_or_train(
                config.harmony.model_path,
                config.corpus_dir,
                config.harmony.order,
                config.harmony.backoff,
            )
        return cls(
            harmony=HarmonyAgent(
                model,
                config.engine.style,
                top_k=config.harmony.top_k,
                cells_per_measure=config.engine.beats_per_measure * 4,
            ),
            agents=build_agents(config),
            matrix=ResourceMatrix(config.engine.beats_per_measure),
            rng=np.random.default_rng([config.engine.seed, 0]),
        )

    def remember(self, tokens):
        self.chord_history.extend(tokens)
        del self.chord_history[:-HISTORY_LIMIT]

    def save_populations(self, config):
        directory = Path(config.xcs.population_dir)
        directory.mkdir(parents=True, exist_ok=True)
        for agent in self.agents:
            save_population(agent.population, population_path(config, agent.agent_id))
        logger.info("saved %d agent populations to %s", len(self.agents), directory)
