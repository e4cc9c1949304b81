from dataclasses import dataclass, fields

from .conditions import Condition
from .exceptions import XcsError

N_ACTIONS = 8


@dataclass(frozen=True)
class XcsParams:
    population_size: int = 400
    learning_rate: float = 0.2
    error_threshold: float = 0.012
    accuracy_power: float = 5.0
    accuracy_scale: float = 0.1
    ga_threshold: int = 25
    crossover_probability: float = 0.8
    mutation_probability: float = 0.04
    wildcard_probability: float = 0.33
    deletion_threshold: int = 20
    explore_probability: float = 0.1
    fitness_threshold: float = 0.1
    subsumption_threshold: int = 20
    tournament_fraction: float = 0.4
    min_actions: int = N_ACTIONS
    initial_prediction: float = 0.01
    initial_error: float = 0.01
    initial_fitness: float = 0.01
    reward_max: float = 1.2
    ga_subsumption: bool = True
    action_set_subsumption: bool = True

    def __post_init__(self):
        for f in fields(self):
            if f.name.endswith("probability") or f.name in ("learning_rate", "tournament_fraction"):
                value = getattr(self, f.name)
                if not 0.0 <= value <= 1.0:
                    raise XcsError(f"{f.name} must lie in [0, 1], got {value}")
        if self.population_size < 1:
            raise XcsError("population_size must be at least 1")
        if not 1 <= self.min_actions <= N_ACTIONS:
            raise XcsError(f"min_actions must lie in 1..{N_ACTIONS}")


@dataclass
class Classifier:
    condition: Condition
    action: int
    prediction: float
    error: float
    fitness: float
    experience: int = 0
    numerosity: int = 1
    action_set_size: float = 1.0
    ga_timestamp: int = 0

    def matches(self, value):
        return self.condition.matches(value)

    def same_rule(self, other):
        return self.action == other.action and self.condition == other.condition

    def could_subsume(self, params):
        return (
            self.experience > params.subsumption_threshold
            and self.error < params.error_threshold
        )

    def subsumes(self, other, params):
        return (
            self.action == other.action
            and self.could_subsume(params)
            and self.condition.is_more_general(other.condition)
        )

    def deletion_vote(self, mean_fitness, params):
        vote = self.action_set_size * self.numerosity
        micro_fitness = self.fitness / self.numerosity
        if self.experience > params.deletion_threshold and micro_fitness < params.fitness_threshold * mean_fitness:
            vote *= mean_fitness / micro_fitness
        return vote

    def describe(self):
        return (
            f"{self.condition} : {self.action} p={self.prediction:.6f} e={self.error:.6f} "
            f"F={self.fitness:.6f} exp={self.experience} num={self.numerosity} "
            f"as={self.action_set_size:.3f} ts={self.ga_timestamp}"
        )
