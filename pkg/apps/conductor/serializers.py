from rest_framework import serializers

from apps.harmony.chords import Style
from apps.osc.messages import TYPE_TAGS
from apps.xcs.population import EXPLOIT, EXPLORE
from .models import ReplayJob


def _config_fields():
    f = serializers
    return {
        "engine.tempo_bpm": f.FloatField(min_value=20.0, max_value=300.0, default=120.0),
        "engine.time_signature": f.RegexField(r"^[2-7]/4$", default="4/4"),
        "engine.style": f.ChoiceField(choices=[s.value for s in Style], default=Style.POP.value),
        "engine.seed": f.IntegerField(min_value=0, default=7),
        "engine.tick_ms": f.IntegerField(min_value=1, max_value=1000, default=30),
        "engine.duration_s": f.FloatField(min_value=0.1, default=60.0),
        "graph.vertex_fade_per_s": f.FloatField(min_value=0.0, default=0.1),
        "graph.edge_fade_per_s": f.FloatField(min_value=0.0, default=0.01),
        "graph.inferred_weight": f.FloatField(min_value=0.0, max_value=1.0, default=0.5),
        "graph.reinforce_step": f.FloatField(min_value=0.0, max_value=1.0, default=0.1),
        "graph.coactivation_threshold": f.FloatField(min_value=0.0, max_value=100.0, default=50.0),
        "graph.edge_floor": f.FloatField(min_value=0.0, max_value=1.0, default=0.01),
        "osc.host": f.CharField(default="127.0.0.1"),
        "osc.port": f.IntegerField(min_value=0, max_value=65535, default=5005),
        "osc.queue_capacity": f.IntegerField(min_value=1, default=65536),
        "harmony.order": f.IntegerField(min_value=1, max_value=8, default=3),
        "harmony.backoff": f.FloatField(min_value=0.0, max_value=1.0, default=0.4),
        "harmony.top_k": f.IntegerField(min_value=1, max_value=96, default=8),
        "harmony.model_path": f.CharField(allow_blank=True, default=""),
        "harmony.corpus_dir": f.CharField(allow_blank=True, default=""),
        "harmony.program": f.IntegerField(min_value=0, max_value=127, default=0),
        "melody.agents": f.IntegerField(min_value=1, max_value=8, default=3),
        "melody.programs": f.CharField(default="73,32,24"),
        "melody.registers": f.CharField(default="60-96,28-64,40-84"),
        "melody.reward_gate": f.FloatField(min_value=0.0, max_value=1.2, default=0.6),
        "melody.h_min": f.FloatField(min_value=0.0, max_value=1.0, default=0.5),
        "melody.transposition_bound": f.IntegerField(min_value=0, max_value=48, default=24),
        "melody.selection_mode": f.ChoiceField(choices=[EXPLORE, EXPLOIT], default=EXPLORE),
        "melody.normalize_happiness": f.BooleanField(default=True),
        "melody.velocity_affect": f.BooleanField(default=False),
        "style.range.jazz": f.FloatField(min_value=0.1, max_value=4.0, default=1.0),
        "style.range.pop": f.FloatField(min_value=0.1, max_value=4.0, default=0.8),
        "style.range.rock": f.FloatField(min_value=0.1, max_value=4.0, default=0.8),
        "style.range.folk": f.FloatField(min_value=0.1, max_value=4.0, default=0.7),
        "xcs.population_size": f.IntegerField(min_value=8, default=400),
        "xcs.learning_rate": f.FloatField(min_value=0.0, max_value=1.0, default=0.2),
        "xcs.error_threshold": f.FloatField(min_value=1e-9, default=0.012),
        "xcs.accuracy_power": f.FloatField(min_value=0.0, default=5.0),
        "xcs.accuracy_scale": f.FloatField(min_value=0.0, max_value=1.0, default=0.1),
        "xcs.ga_threshold": f.IntegerField(min_value=0, default=25),
        "xcs.crossover_probability": f.FloatField(min_value=0.0, max_value=1.0, default=0.8),
        "xcs.mutation_probability": f.FloatField(min_value=0.0, max_value=1.0, default=0.04),
        "xcs.wildcard_probability": f.FloatField(min_value=0.0, max_value=1.0, default=0.33),
        "xcs.deletion_threshold": f.IntegerField(min_value=0, default=20),
        "xcs.explore_probability": f.FloatField(min_value=0.0, max_value=1.0, default=0.1),
        "xcs.subsumption_threshold": f.IntegerField(min_value=0, default=20),
        "xcs.persist": f.BooleanField(default=False),
        "xcs.population_dir": f.CharField(default="populations"),
        "themes.dir": f.CharField(allow_blank=True, default=""),
        "themes.default_id": f.IntegerField(min_value=0, max_value=63, default=0),
        "themes.mutation_rate": f.FloatField(min_value=0.0, max_value=1.0, default=0.1),
        "percussion.enabled": f.BooleanField(default=True),
        "percussion.ornament_probability": f.FloatField(min_value=0.0, max_value=1.0, default=0.1),
        "render.midi_port": f.CharField(allow_blank=True, default=""),
        "status.enabled": f.BooleanField(default=False),
        "status.key": f.CharField(default="ams:status"),
    }


def _int_list(text, low, high):
    values = []
    for part in text.split(","):
        part = part.strip()
        if not part.isdigit() or not low <= int(part) <= high:
            raise serializers.ValidationError(f"{part!r} is not an integer in [{low}, {high}].")
        values.append(int(part))
    return tuple(values)


class EngineConfigSerializer(serializers.Serializer):
    """Flat `section.key` input; validated data comes out nested by section."""

    def get_fields(self):
        return _config_fields()

    def to_internal_value(self, data):
        unknown = sorted(set(data) - set(self.fields))
        if unknown:
            raise serializers.ValidationError({key: ["Unknown configuration key."] for key in unknown})
        return super().to_internal_value(data)

    def validate(self, attrs):
        melody = attrs["melody"]
        errors = {}
        try:
            melody["programs"] = _int_list(melody["programs"], 0, 127)
        except serializers.ValidationError as exc:
            errors["melody.programs"] = exc.detail
        try:
            registers = []
            for part in melody["registers"].split(","):
                low, sep, high = part.strip().partition("-")
                if not sep:
                    raise serializers.ValidationError(f"{part!r} is not a 'low-high' range.")
                low, high = _int_list(f"{low},{high}", 0, 127)
                if low > high:
                    raise serializers.ValidationError(f"{part!r} is an empty range.")
                registers.append((low, high))
            melody["registers"] = tuple(registers)
        except serializers.ValidationError as exc:
            errors["melody.registers"] = exc.detail
        if errors:
            raise serializers.ValidationError(errors)
        engine = attrs["engine"]
        engine["beats_per_measure"] = int(engine.pop("time_signature").split("/")[0])
        return attrs


class TraceEventSerializer(serializers.Serializer):
    t_ms = serializers.IntegerField(min_value=0)
    addr = serializers.CharField()
    args = serializers.ListField(child=serializers.JSONField(), allow_empty=True)

    def validate(self, data):
        tags = TYPE_TAGS.get(data["addr"])
        if tags is not None and len(tags) != len(data["args"]):
            raise serializers.ValidationError(
                f"{data['addr']} takes {len(tags)} arguments, got {len(data['args'])}."
            )
        return data


class ReplayJobSerializer(serializers.ModelSerializer):
    class Meta:
        model = ReplayJob
        fields = [
            "id",
            "trace_path",
            "config_path",
            "output_path",
            "duration_s",
            "status",
            "midi_sha256",
            "cycles",
            "error",
            "created_at",
            "started_at",
            "finished_at",
        ]
        read_only_fields = fields


class ReplayJobCreateSerializer(serializers.Serializer):
    trace = serializers.CharField()
    config = serializers.CharField(required=False, allow_blank=True, default="")
    out = serializers.CharField()
    duration_s = serializers.FloatField(required=False, min_value=0.1, allow_null=True, default=None)

    def validate_out(self, value):
        if not value.endswith(".mid"):
            raise serializers.ValidationError("Output path must end in .mid")
        return value
