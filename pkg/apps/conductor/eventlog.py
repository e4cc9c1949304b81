import json

FLOAT_DIGITS = 6


def _rounded(value):
    if isinstance(value, float):
        return round(value, FLOAT_DIGITS)
    if isinstance(value, dict):
        return {k: _rounded(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_rounded(v) for v in value]
    return value


def event_line(record):
    return json.dumps(_rounded(record), sort_keys=True, separators=(",", ":"))


class EventLogWriter:
    """Decision log: one JSON object per leader/chords/agent/percussion event."""

    def __init__(self, stream):
        self.stream = stream

    def write(self, records):
        for record in records:
            self.stream.write(event_line(record) + "\n")
        self.stream.flush()


def read_event_log(path):
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]
