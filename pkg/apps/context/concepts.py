from dataclasses import dataclass, fields
from enum import Enum


class Affect(str, Enum):
    HAPPINESS = "happiness"
    EXCITEMENT = "excitement"
    ANGER = "anger"
    SADNESS = "sadness"
    TENDERNESS = "tenderness"
    THREAT = "threat"

    @classmethod
    def parse(cls, name):
        """Case-insensitive lookup; returns None for anything that is not an affect."""
        try:
            return cls(str(name).strip().lower())
        except ValueError:
            return None


# canonical order, also the order of the XCS input bits
AFFECT_ORDER = tuple(Affect)


class VertexKind(str, Enum):
    AFFECT = "affect"
    OBJECT = "object"
    ENVIRONMENT = "environment"


class EdgeProvenance(str, Enum):
    EXPLICIT = "explicit"
    INFERRED = "inferred"


class ActivationMode(str, Enum):
    SET = "set"
    ADD = "add"


@dataclass(frozen=True)
class AffectSnapshot:
    happiness: float = 0.0
    excitement: float = 0.0
    anger: float = 0.0
    sadness: float = 0.0
    tenderness: float = 0.0
    threat: float = 0.0

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not 0.0 <= value <= 100.0:
                raise ValueError(f"{f.name} activation {value!r} outside [0, 100]")

    def level(self, affect):
        return getattr(self, Affect(affect).value)

    def values(self):
        return tuple(getattr(self, a.value) for a in AFFECT_ORDER)

    def as_dict(self):
        return {a.value: getattr(self, a.value) for a in AFFECT_ORDER}


@dataclass(frozen=True)
class ConceptVertex:
    id: str
    kind: VertexKind
    activation: float
    theme: int | None
    last_activated: int


@dataclass(frozen=True)
class ConceptEdge:
    a: str
    b: str
    weight: float
    provenance: EdgeProvenance
