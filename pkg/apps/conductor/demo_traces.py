"""Bundled demo sessions, rebuilt by `manage.py seed_assets`."""
import numpy as np
from faker import Faker

from apps.osc.messages import ADDR_ACTIVATE, ADDR_AFFECT, ADDR_EDGE, ADDR_THEME
from .trace import TraceEvent


def _theme(t, concept, theme_id):
    return TraceEvent(t, ADDR_THEME, (concept, str(theme_id)))


def _activate(t, name, level, kind="object", mode="set"):
    return TraceEvent(t, ADDR_ACTIVATE, (name, kind, level, mode))


def _affect(t, category, level, mode="set"):
    return TraceEvent(t, ADDR_AFFECT, (category, level, mode))


def _edge(t, a, b, weight):
    return TraceEvent(t, ADDR_EDGE, (a, b, weight))


def threat_ramp(duration_s=60):
    """A calm meadow turns into an enemy encounter while threat climbs to 100."""
    events = [
        _theme(0, "meadow", 1),
        _theme(0, "enemy", 6),
        _activate(0, "meadow", 100),
        _activate(0, "enemy", 0),
        _edge(0, "enemy", "threat", 1.0),
    ]
    for s in range(1, duration_s + 1):
        events.append(_affect(s * 1000, "threat", s * 100 // duration_s))
        events.append(_activate(s * 1000, "enemy", min(100, 2 * s)))
    return events


def happiness_plateau(duration_s=60):
    events = [_theme(0, "village", 4), _activate(0, "village", 100)]
    for s in range(0, duration_s + 1):
        events.append(_affect(s * 1000, "happiness", min(80, 16 * s)))
        if s and s % 10 == 0:
            events.append(_activate(s * 1000, "village", 100))
    return events


def sadness_plateau(duration_s=60):
    """Grandma's bittersweet farewell: sadness held at 90 with some warmth left."""
    events = [
        _theme(0, "grandma", 3),
        _activate(0, "grandma", 100),
        _edge(0, "grandma", "sadness", 0.9),
        _edge(0, "grandma", "tenderness", 0.6),
    ]
    for s in range(0, duration_s + 1):
        events.append(_affect(s * 1000, "sadness", 90))
        events.append(_affect(s * 1000, "happiness", 40))
        events.append(_activate(s * 1000, "grandma", 100))
    return events


def mixed_session(duration_s=60):
    """Overworld, a fight, a dungeon and a new item, with the usual 100/20/+10 calibration."""
    events = [
        _activate(0, "outdoors", 100, kind="environment"),
        _theme(0, "sword", 2),
        _activate(0, "sword", 20),
        _edge(0, "sword", "excitement", 0.8),
        _theme(0, "heart", 5),
        _edge(0, "heart", "happiness", 0.7),
        _theme(0, "enemy", 6),
        _edge(0, "enemy", "threat", 1.0),
    ]
    for s in range(2, 22, 2):
        events.append(_activate(s * 1000, "enemy", 10, mode="add"))
    events.append(_activate(24000, "heart", 60))
    events.append(_activate(30000, "dungeon", 100, kind="environment"))
    events.append(_theme(32000, "boss", 7))
    events.append(_activate(32000, "boss", 80))
    events.append(_edge(32000, "boss", "threat", 0.9))
    events.append(_edge(32000, "boss", "anger", 0.6))
    events.append(_edge(40000, "lantern", "sword", 0.6))
    events.append(_activate(40000, "lantern", 70))
    return [e for e in events if e.t_ms <= duration_s * 1000]


DEMO_TRACES = {
    "threat_ramp": threat_ramp,
    "happiness_plateau": happiness_plateau,
    "sadness_plateau": sadness_plateau,
    "mixed_session": mixed_session,
}


def soak_trace(concepts, duration_s=60, seed=0, events_per_s=20):
    """Random activity over `concepts` fake object names, for load testing."""
    fake = Faker()
    Faker.seed(seed)
    rng = np.random.default_rng(seed)
    names = [fake.unique.word() for _ in range(concepts)]
    themed = names[: min(8, len(names))]
    events = [_theme(0, name, i) for i, name in enumerate(themed)]
    affects = ["happiness", "excitement", "anger", "sadness", "tenderness", "threat"]
    times = np.sort(rng.integers(0, duration_s * 1000, size=duration_s * events_per_s))
    for t in times.tolist():
        roll = rng.random()
        if roll < 0.6:
            events.append(_activate(t, names[int(rng.integers(len(names)))], int(rng.integers(101))))
        elif roll < 0.85:
            events.append(_affect(t, affects[int(rng.integers(6))], int(rng.integers(101))))
        else:
            a, b = rng.choice(len(names), size=2, replace=False).tolist() if len(names) > 1 else (0, 0)
            if a != b:
                events.append(_edge(t, names[a], names[b], round(float(rng.random()), 2)))
    return events
