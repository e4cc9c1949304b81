import math

from rest_framework import serializers

from apps.context.concepts import ActivationMode, Affect, VertexKind
from .messages import (
    ADDR_ACTIVATE,
    ADDR_AFFECT,
    ADDR_EDGE,
    ADDR_THEME,
    ActivateConcept,
    AssignTheme,
    SetAffect,
    SetEdge,
)

MAX_NAME_LENGTH = 256


def _finite(value):
    if not math.isfinite(value):
        raise serializers.ValidationError("Must be a finite number.")
    return value


class ConceptNameField(serializers.CharField):
    def __init__(self, **kwargs):
        kwargs.setdefault("max_length", MAX_NAME_LENGTH)
        kwargs.setdefault("trim_whitespace", False)
        super().__init__(**kwargs)


class ActivateSerializer(serializers.Serializer):
    name = ConceptNameField()
    kind = serializers.ChoiceField(choices=[VertexKind.OBJECT.value, VertexKind.ENVIRONMENT.value])
    level = serializers.FloatField(min_value=0.0, max_value=100.0)
    mode = serializers.ChoiceField(choices=[m.value for m in ActivationMode])

    def validate_level(self, value):
        return _finite(value)

    def to_message(self):
        data = self.validated_data
        return ActivateConcept(
            name=data["name"],
            kind=VertexKind(data["kind"]),
            level=data["level"],
            mode=ActivationMode(data["mode"]),
        )


class AffectSerializer(serializers.Serializer):
    category = serializers.CharField(trim_whitespace=False)
    level = serializers.FloatField(min_value=0.0, max_value=100.0)
    mode = serializers.ChoiceField(choices=[m.value for m in ActivationMode])

    def validate_category(self, value):
        if Affect.parse(value) is None:
            raise serializers.ValidationError(f"Unknown affect category {value!r}.")
        return value

    def validate_level(self, value):
        return _finite(value)

    def to_message(self):
        data = self.validated_data
        return SetAffect(
            category=Affect.parse(data["category"]),
            level=data["level"],
            mode=ActivationMode(data["mode"]),
            spelling=data["category"],
        )


class EdgeSerializer(serializers.Serializer):
    a = ConceptNameField()
    b = ConceptNameField()
    weight = serializers.FloatField(min_value=0.0, max_value=1.0)

    def validate_weight(self, value):
        return _finite(value)

    def to_message(self):
        data = self.validated_data
        return SetEdge(a=data["a"], b=data["b"], weight=data["weight"])


class ThemeSerializer(serializers.Serializer):
    concept = ConceptNameField()
    theme_id = serializers.CharField()

    def validate_theme_id(self, value):
        if not value.isdigit() or len(value) > 2 or not 0 <= int(value) <= 63:
            raise serializers.ValidationError("Theme id must be a decimal integer in [0, 63].")
        return int(value)

    def to_message(self):
        data = self.validated_data
        return AssignTheme(concept=data["concept"], theme_id=data["theme_id"])


# address -> (serializer, positional argument names)
MESSAGE_SCHEMAS = {
    ADDR_ACTIVATE: (ActivateSerializer, ("name", "kind", "level", "mode")),
    ADDR_AFFECT: (AffectSerializer, ("category", "level", "mode")),
    ADDR_EDGE: (EdgeSerializer, ("a", "b", "weight")),
    ADDR_THEME: (ThemeSerializer, ("concept", "theme_id")),
}
