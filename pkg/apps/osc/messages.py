from dataclasses import dataclass, field

from apps.context.concepts import ActivationMode, Affect, VertexKind

ADDR_ACTIVATE = "/ams/activate"
ADDR_AFFECT = "/ams/affect"
ADDR_EDGE = "/ams/edge"
ADDR_THEME = "/ams/theme"

# address -> OSC type tags (after the leading ',')
TYPE_TAGS = {
    ADDR_ACTIVATE: "ssfs",
    ADDR_AFFECT: "sfs",
    ADDR_EDGE: "ssf",
    ADDR_THEME: "ss",
}


@dataclass(frozen=True)
class ActivateConcept:
    name: str
    kind: VertexKind
    level: float
    mode: ActivationMode = ActivationMode.SET

    @property
    def address(self):
        return ADDR_ACTIVATE

    def osc_args(self):
        return [self.name, self.kind.value, float(self.level), self.mode.value]


@dataclass(frozen=True)
class SetAffect:
    """`spelling` is the category text as received; it goes back on the wire unchanged."""

    category: Affect
    level: float
    mode: ActivationMode = ActivationMode.SET
    spelling: str | None = field(default=None, compare=False)

    @property
    def address(self):
        return ADDR_AFFECT

    def osc_args(self):
        return [self.spelling or self.category.value, float(self.level), self.mode.value]


@dataclass(frozen=True)
class SetEdge:
    a: str
    b: str
    weight: float

    @property
    def address(self):
        return ADDR_EDGE

    def osc_args(self):
        return [self.a, self.b, float(self.weight)]


@dataclass(frozen=True)
class AssignTheme:
    concept: str
    theme_id: int

    @property
    def address(self):
        return ADDR_THEME

    def osc_args(self):
        # theme ids travel as decimal strings
        return [self.concept, str(self.theme_id)]


GameMessage = ActivateConcept | SetAffect | SetEdge | AssignTheme
