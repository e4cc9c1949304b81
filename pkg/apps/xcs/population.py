"""
Single-step XCS population: matching with covering, prediction arrays,
Widrow-Hoff updates with accuracy-based fitness, a niche GA on the action
set, subsumption and roulette deletion.
"""
import logging
from dataclasses import dataclass, replace

from .classifier import N_ACTIONS, Classifier, XcsParams
from .conditions import Condition, situation_bits
from .exceptions import XcsError

logger = logging.getLogger(__name__)

EXPLORE = "explore"
EXPLOIT = "exploit"


@dataclass(frozen=True)
class ActionChoice:
    action: int
    prediction: float
    explored: bool


def prediction_array(match_set):
    """Fitness-weighted mean prediction per action present in the match set."""
    weighted, weights = {}, {}
    for cl in match_set:
        weighted[cl.action] = weighted.get(cl.action, 0.0) + cl.prediction * cl.fitness
        weights[cl.action] = weights.get(cl.action, 0.0) + cl.fitness
    return {
        action: weighted[action] / weights[action] if weights[action] > 0 else 0.0
        for action in sorted(weighted)
    }


def select_action(match_set, mode, rng, explore_probability=0.1):
    if not match_set:
        raise XcsError("cannot select from an empty match set")
    predictions = prediction_array(match_set)
    actions = sorted(predictions)
    if mode not in (EXPLORE, EXPLOIT):
        raise XcsError(f"unknown selection mode {mode!r}")
    if mode == EXPLORE and rng.random() < explore_probability:
        action = actions[int(rng.integers(len(actions)))]
        return ActionChoice(action, predictions[action], True)
    best = max(actions, key=lambda a: (predictions[a], -a))
    return ActionChoice(best, predictions[best], False)


class Population:
    def __init__(self, params=None, condition_length=18, n_actions=N_ACTIONS):
        self.params = params or XcsParams()
        self.condition_length = condition_length
        self.n_actions = n_actions
        self.classifiers = []
        self.time = 0

    def __len__(self):
        return len(self.classifiers)

    @property
    def numerosity(self):
        return sum(cl.numerosity for cl in self.classifiers)

    # ---------------------------------------------------------------- matching

    def match_set(self, situation, rng):
        if len(situation) != self.condition_length:
            raise XcsError(f"situation must have {self.condition_length} bits, got {len(situation)}")
        value = situation_bits(situation)
        matched = [cl for cl in self.classifiers if cl.matches(value)]
        covered = {cl.action for cl in matched}
        missing = [a for a in range(self.n_actions) if a not in covered]
        if len(covered) < self.params.min_actions and missing:
            new = [self._cover(situation, action, rng) for action in missing]
            logger.debug("covering %d actions for %s", len(new), situation)
            self.classifiers.extend(new)
            self._enforce_cap(rng, protected=new)
            matched = [cl for cl in self.classifiers if cl.matches(value)]
        return matched

    def _cover(self, situation, action, rng):
        p = self.params
        return Classifier(
            condition=Condition.cover(situation, p.wildcard_probability, rng),
            action=action,
            prediction=p.initial_prediction,
            error=p.initial_error,
            fitness=p.initial_fitness,
            ga_timestamp=self.time,
        )

    def select_action(self, match_set, mode, rng):
        return select_action(match_set, mode, rng, self.params.explore_probability)

    @staticmethod
    def action_set(match_set, action):
        return [cl for cl in match_set if cl.action == action]

    # ----------------------------------------------------------------- updates

    def update(self, action_set, reward, situation, rng):
        if not action_set:
            raise XcsError("cannot update an empty action set")
        p = self.params
        reward = min(max(float(reward), 0.0), p.reward_max)
        self.time += 1
        set_size = sum(cl.numerosity for cl in action_set)
        for cl in action_set:
            cl.experience += 1
            # MAM: plain averaging until 1/experience drops below beta
            rate = max(p.learning_rate, 1.0 / cl.experience)
            cl.prediction += rate * (reward - cl.prediction)
            cl.error += rate * (abs(reward - cl.prediction) - cl.error)
            cl.action_set_size += rate * (set_size - cl.action_set_size)
        self._update_fitness(action_set)
        if p.action_set_subsumption:
            self._action_set_subsumption(action_set)
            alive = {id(cl) for cl in self.classifiers}
            action_set = [cl for cl in action_set if id(cl) in alive]
        if action_set:
            self._run_ga(action_set, situation, rng)
        # a covering round may have left the population above the cap
        self._enforce_cap(rng)

    def _update_fitness(self, action_set):
        p = self.params
        accuracies = []
        for cl in action_set:
            if cl.error < p.error_threshold:
                kappa = 1.0
            else:
                kappa = p.accuracy_scale * (cl.error / p.error_threshold) ** -p.accuracy_power
            accuracies.append(kappa * cl.numerosity)
        total = sum(accuracies)
        for cl, accuracy in zip(action_set, accuracies):
            cl.fitness += p.learning_rate * (accuracy / total - cl.fitness)

    def _action_set_subsumption(self, action_set):
        p = self.params
        candidates = [cl for cl in action_set if cl.could_subsume(p)]
        if not candidates:
            return
        subsumer = max(candidates, key=lambda cl: cl.condition.wildcards)
        for cl in action_set:
            if cl is not subsumer and subsumer.condition.is_more_general(cl.condition):
                subsumer.numerosity += cl.numerosity
                self._remove(cl)

    # ---------------------------------------------------------------------- GA

    def _run_ga(self, action_set, situation, rng):
        p = self.params
        total = sum(cl.numerosity for cl in action_set)
        average_stamp = sum(cl.ga_timestamp * cl.numerosity for cl in action_set) / total
        if self.time - average_stamp <= p.ga_threshold:
            return
        for cl in action_set:
            cl.ga_timestamp = self.time

        parent_a = self._tournament(action_set, rng)
        parent_b = self._tournament(action_set, rng)
        child_a = replace(parent_a, numerosity=1, experience=0, ga_timestamp=self.time)
        child_b = replace(parent_b, numerosity=1, experience=0, ga_timestamp=self.time)

        if rng.random() < p.crossover_probability:
            cond_a, cond_b = parent_a.condition.crossover(parent_b.condition, rng)
            child_a.condition, child_b.condition = cond_a, cond_b
            prediction = (parent_a.prediction + parent_b.prediction) / 2
            error = (parent_a.error + parent_b.error) / 2
            fitness = (parent_a.fitness + parent_b.fitness) / 2
            for child in (child_a, child_b):
                child.prediction, child.error, child.fitness = prediction, error, fitness

        value = situation_bits(situation)
        for child in (child_a, child_b):
            child.fitness *= 0.1
            child.condition = child.condition.mutate(value, p.mutation_probability, rng)
            if p.ga_subsumption and parent_a.subsumes(child, p):
                parent_a.numerosity += 1
            elif p.ga_subsumption and parent_b.subsumes(child, p):
                parent_b.numerosity += 1
            else:
                self._insert(child)

    def _tournament(self, action_set, rng):
        tau = self.params.tournament_fraction
        while True:
            entrants = [cl for cl in action_set if rng.random() < tau]
            if entrants:
                return max(entrants, key=lambda cl: cl.fitness)

    def _insert(self, child):
        for cl in self.classifiers:
            if cl.same_rule(child):
                cl.numerosity += 1
                return
        self.classifiers.append(child)

    def _remove(self, victim):
        self.classifiers = [cl for cl in self.classifiers if cl is not victim]

    # ---------------------------------------------------------------- deletion

    def _enforce_cap(self, rng, protected=()):
        p = self.params
        shielded = {id(cl) for cl in protected}
        while self.numerosity > p.population_size:
            pool = [cl for cl in self.classifiers if id(cl) not in shielded]
            if not pool:
                logger.debug(
                    "covering round holds %d classifiers over a cap of %d", self.numerosity, p.population_size
                )
                break
            mean_fitness = sum(cl.fitness for cl in self.classifiers) / self.numerosity
            votes = [cl.deletion_vote(mean_fitness, p) for cl in pool]
            point = rng.random() * sum(votes)
            victim = pool[-1]
            for cl, vote in zip(pool, votes):
                point -= vote
                if point <= 0:
                    victim = cl
                    break
            if victim.numerosity > 1:
                victim.numerosity -= 1
            else:
                self._remove(victim)
