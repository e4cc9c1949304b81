import json
import struct
from dataclasses import asdict
from pathlib import Path

from .classifier import Classifier, XcsParams
from .conditions import Condition
from .exceptions import XcsError
from .population import Population

MAGIC = b"AMSX"
FORMAT_VERSION = 1
_HEADER = struct.Struct(">4sHHI")


def dump_population(population):
    """One macro-classifier per line, most numerous first."""
    ordered = sorted(
        population.classifiers,
        key=lambda cl: (-cl.numerosity, cl.action, str(cl.condition)),
    )
    return "".join(cl.describe() + "\n" for cl in ordered)


def save_population(population, path):
    payload = {
        "params": asdict(population.params),
        "time": population.time,
        "n_actions": population.n_actions,
        "classifiers": [
            [
                str(cl.condition),
                cl.action,
                cl.prediction,
                cl.error,
                cl.fitness,
                cl.experience,
                cl.numerosity,
                cl.action_set_size,
                cl.ga_timestamp,
            ]
            for cl in population.classifiers
        ],
    }
    body = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("utf-8")
    header = _HEADER.pack(MAGIC, FORMAT_VERSION, population.condition_length, len(body))
    Path(path).write_bytes(header + body)


def load_population(path, params=None):
    """Restores a population; `params` overrides the stored parameters when given."""
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise XcsError(f"{path}: truncated population file")
    magic, version, length, size = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise XcsError(f"{path}: not a population file")
    if version != FORMAT_VERSION:
        raise XcsError(f"{path}: unsupported population version {version}")
    try:
        payload = json.loads(data[_HEADER.size:_HEADER.size + size])
        population = Population(
            params or XcsParams(**payload["params"]),
            condition_length=length,
            n_actions=payload["n_actions"],
        )
        population.time = payload["time"]
        for cond, action, p, e, f, exp, num, as_size, ts in payload["classifiers"]:
            condition = Condition.parse(cond)
            if condition.length != length:
                raise XcsError(f"{path}: condition {cond!r} has the wrong length")
            population.classifiers.append(
                Classifier(condition, action, p, e, f, exp, num, as_size, ts)
            )
    except (ValueError, KeyError, TypeError) as exc:
        raise XcsError(f"{path}: corrupt population payload ({exc})") from exc
    return population
