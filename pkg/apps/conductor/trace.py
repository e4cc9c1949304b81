import json
import logging
from dataclasses import dataclass
from pathlib import Path

from .exceptions import TraceError
from .serializers import TraceEventSerializer

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TraceEvent:
    t_ms: int
    addr: str
    args: tuple

    def to_json(self):
        return json.dumps({"t_ms": self.t_ms, "addr": self.addr, "args": list(self.args)}, sort_keys=True)


def parse_trace(text):
    events = []
    last = 0
    for line_no, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        try:
            data = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise TraceError(f"not a JSON object ({exc.msg})", line_no) from None
        if not isinstance(data, dict):
            raise TraceError("not a JSON object", line_no)
        serializer = TraceEventSerializer(data=data)
        if not serializer.is_valid():
            raise TraceError(json.dumps(serializer.errors, sort_keys=True), line_no)
        event = TraceEvent(
            serializer.validated_data["t_ms"],
            serializer.validated_data["addr"],
            tuple(serializer.validated_data["args"]),
        )
        if event.t_ms < last:
            raise TraceError(f"timestamp {event.t_ms} goes back from {last}", line_no)
        last = event.t_ms
        events.append(event)
    return events


def load_trace(path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise TraceError(f"cannot read trace {path}: {exc}") from exc
    events = parse_trace(text)
    logger.info("loaded %d trace events from %s", len(events), path)
    return events


def write_trace(events, path):
    Path(path).write_text("".join(e.to_json() + "\n" for e in events), encoding="utf-8")
