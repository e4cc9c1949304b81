"""
Theme files are small text records:

    theme_id: 3
    name: grandma
    key: F major
    length_measures: 2
    notes:
    65 0 960 90
    ...

one note per line as `pitch onset duration velocity`, ticks at 480 per quarter.
"""
import hashlib
import logging
from dataclasses import dataclass
from pathlib import Path

from rest_framework import serializers

from .exceptions import ThemeFormatError
from .notes import Key, MelodicFragment, Note, measure_ticks

logger = logging.getLogger(__name__)

MAX_THEME_ID = 63
THEME_SUFFIX = ".theme"


@dataclass(frozen=True)
class Theme:
    theme_id: int
    fragment: MelodicFragment
    name: str = ""

    @property
    def length_measures(self):
        return self.fragment.length_ticks // measure_ticks()

    def to_text(self):
        lines = [
            f"theme_id: {self.theme_id}",
            f"name: {self.name}",
            f"key: {self.fragment.key}",
            f"length_measures: {self.length_measures}",
            "notes:",
        ]
        lines += [f"{n.pitch} {n.onset} {n.duration} {n.velocity}" for n in self.fragment.notes]
        return "\n".join(lines) + "\n"

    @property
    def digest(self):
        return hashlib.sha256(self.to_text().encode("utf-8")).hexdigest()


class NoteSerializer(serializers.Serializer):
    pitch = serializers.IntegerField(min_value=0, max_value=127)
    onset = serializers.IntegerField(min_value=0)
    duration = serializers.IntegerField(min_value=1)
    velocity = serializers.IntegerField(min_value=1, max_value=127)


class ThemeRecordSerializer(serializers.Serializer):
    theme_id = serializers.IntegerField(min_value=0, max_value=MAX_THEME_ID)
    name = serializers.CharField(required=False, allow_blank=True, default="")
    key = serializers.CharField()
    length_measures = serializers.IntegerField(min_value=1, max_value=4)
    notes = NoteSerializer(many=True, allow_empty=False)

    def validate_key(self, value):
        try:
            return Key.parse(value)
        except ValueError as exc:
            raise serializers.ValidationError(str(exc)) from None

    def validate(self, data):
        length = data["length_measures"] * measure_ticks()
        notes = sorted(data["notes"], key=lambda n: n["onset"])
        for a, b in zip(notes, notes[1:]):
            if a["onset"] + a["duration"] > b["onset"]:
                raise serializers.ValidationError("Theme notes must not overlap.")
        if notes[-1]["onset"] + notes[-1]["duration"] > length:
            raise serializers.ValidationError("Theme notes run past the declared length.")
        return data

    def to_theme(self):
        data = self.validated_data
        fragment = MelodicFragment(
            tuple(Note(**n) for n in data["notes"]),
            data["length_measures"] * measure_ticks(),
            key=data["key"],
        )
        return Theme(data["theme_id"], fragment, data["name"])


def parse_theme(text, path=None):
    record = {}
    notes = []
    in_notes = False
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if in_notes:
            parts = line.split()
            if len(parts) != 4:
                raise ThemeFormatError(f"line {line_no}: expected 'pitch onset duration velocity'", path)
            notes.append(dict(zip(("pitch", "onset", "duration", "velocity"), parts)))
            continue
        field, sep, value = line.partition(":")
        if not sep:
            raise ThemeFormatError(f"line {line_no}: expected 'field: value'", path)
        if field.strip() == "notes":
            in_notes = True
        else:
            record[field.strip()] = value.strip()
    record["notes"] = notes
    serializer = ThemeRecordSerializer(data=record)
    if not serializer.is_valid():
        raise ThemeFormatError(str(serializer.errors), path)
    return serializer.to_theme()


class ThemeLibrary:
    def __init__(self, themes=()):
        self._themes = {}
        for theme in themes:
            self.add(theme)

    @classmethod
    def load_directory(cls, directory):
        directory = Path(directory)
        library = cls()
        for path in sorted(directory.glob(f"*{THEME_SUFFIX}")):
            library.add(parse_theme(path.read_text(encoding="utf-8"), path))
        logger.info("loaded %d themes from %s", len(library), directory)
        return library

    def __len__(self):
        return len(self._themes)

    def __contains__(self, theme_id):
        return theme_id in self._themes

    def __iter__(self):
        return iter(self._themes[i] for i in sorted(self._themes))

    def get(self, theme_id):
        return self._themes.get(theme_id)

    def add(self, theme):
        if theme.theme_id in self._themes:
            raise ThemeFormatError(f"duplicate theme id {theme.theme_id}")
        self._themes[theme.theme_id] = theme
        return theme

    def next_free_id(self):
        for theme_id in range(MAX_THEME_ID + 1):
            if theme_id not in self._themes:
                return theme_id
        return None
