import logging
from dataclasses import dataclass, field
from pathlib import Path

from django.conf import settings

from apps.context.graph import GraphSettings
from apps.harmony.chords import Style
from apps.melody.reward import STYLE_RANGE
from apps.xcs.classifier import XcsParams
from .exceptions import ConfigError
from .serializers import EngineConfigSerializer

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EngineSection:
    tempo_bpm: float = 120.0
    beats_per_measure: int = 4
    style: Style = Style.POP
    seed: int = 7
    tick_ms: int = 30
    duration_s: float = 60.0


@dataclass(frozen=True)
class OscSettings:
    host: str = "127.0.0.1"
    port: int = 5005
    queue_capacity: int = 65536


@dataclass(frozen=True)
class HarmonySettings:
    order: int = 3
    backoff: float = 0.4
    top_k: int = 8
    model_path: str = ""
    corpus_dir: str = ""
    program: int = 0


@dataclass(frozen=True)
class MelodySettings:
    agents: int = 3
    programs: tuple = (73, 32, 24)
    registers: tuple = ((60, 96), (28, 64), (40, 84))
    reward_gate: float = 0.6
    h_min: float = 0.5
    transposition_bound: int = 24
    selection_mode: str = "explore"
    normalize_happiness: bool = True
    velocity_affect: bool = False

    def register(self, index):
        return self.registers[min(index, len(self.registers) - 1)]

    def program(self, index):
        return self.programs[min(index, len(self.programs) - 1)]


@dataclass(frozen=True)
class XcsSettings:
    params: XcsParams = field(default_factory=XcsParams)
    persist: bool = False
    population_dir: str = "populations"


@dataclass(frozen=True)
class ThemeSettings:
    dir: str = ""
    default_id: int = 0
    mutation_rate: float = 0.1


@dataclass(frozen=True)
class PercussionSettings:
    enabled: bool = True
    ornament_probability: float = 0.1


@dataclass(frozen=True)
class StatusSettings:
    enabled: bool = False
    key: str = "ams:status"


@dataclass(frozen=True)
class EngineConfig:
    engine: EngineSection = field(default_factory=EngineSection)
    graph: GraphSettings = field(default_factory=GraphSettings)
    osc: OscSettings = field(default_factory=OscSettings)
    harmony: HarmonySettings = field(default_factory=HarmonySettings)
    melody: MelodySettings = field(default_factory=MelodySettings)
    style_range: dict = field(default_factory=lambda: dict(STYLE_RANGE))
    xcs: XcsSettings = field(default_factory=XcsSettings)
    themes: ThemeSettings = field(default_factory=ThemeSettings)
    percussion: PercussionSettings = field(default_factory=PercussionSettings)
    midi_port: str = ""
    status: StatusSettings = field(default_factory=StatusSettings)

    @property
    def measure_ticks(self):
        return self.engine.beats_per_measure * 480

    @property
    def cycle_ms(self):
        """Two measures of wall-clock time."""
        return 2 * self.engine.beats_per_measure * 60000.0 / self.engine.tempo_bpm

    @property
    def corpus_dir(self):
        return Path(self.harmony.corpus_dir or settings.AMS_ASSETS_DIR / "corpora")

    @property
    def theme_dir(self):
        return Path(self.themes.dir or settings.AMS_ASSETS_DIR / "themes")

    @classmethod
    def from_mapping(cls, values):
        serializer = EngineConfigSerializer(data=dict(values))
        if not serializer.is_valid():
            errors = {key: [str(e) for e in value] for key, value in serializer.errors.items()}
            lines = [f"{key}: {'; '.join(msgs)}" for key, msgs in sorted(errors.items())]
            raise ConfigError("invalid configuration\n  " + "\n  ".join(lines), errors)
        return cls.from_validated(serializer.validated_data)

    @classmethod
    def from_validated(cls, data):
        engine = dict(data["engine"])
        engine["style"] = Style(engine["style"])
        xcs = dict(data["xcs"])
        persist = xcs.pop("persist")
        population_dir = xcs.pop("population_dir")
        return cls(
            engine=EngineSection(**engine),
            graph=GraphSettings(**data["graph"]),
            osc=OscSettings(**data["osc"]),
            harmony=HarmonySettings(**data["harmony"]),
            melody=MelodySettings(**data["melody"]),
            style_range={Style(k): v for k, v in data["style"]["range"].items()},
            xcs=XcsSettings(XcsParams(**xcs), persist, population_dir),
            themes=ThemeSettings(**data["themes"]),
            percussion=PercussionSettings(**data["percussion"]),
            midi_port=data["render"]["midi_port"],
            status=StatusSettings(**data["status"]),
        )

    @classmethod
    def from_file(cls, path):
        return cls.load(path)

    @classmethod
    def load(cls, path=None, overrides=None):
        """Defaults, then the file (if any), then explicit overrides."""
        values = {}
        if path:
            path = Path(path)
            try:
                values = parse_config_text(path.read_text(encoding="utf-8"))
            except OSError as exc:
                raise ConfigError(f"cannot read config {path}: {exc}") from exc
            logger.info("loaded engine config from %s", path)
        values.update(overrides or {})
        return cls.from_mapping(values)


def parse_config_text(text):
    values = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"line {line_no}: expected 'key = value'")
        key = key.strip()
        if key in values:
            raise ConfigError(f"line {line_no}: duplicate key {key!r}")
        values[key] = value.strip()
    return values
