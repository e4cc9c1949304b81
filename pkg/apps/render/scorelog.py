import json


def score_log_line(note):
    return json.dumps(
        {
            "t_ticks": note.start,
            "instrument": note.instrument,
            "pitch": note.pitch,
            "dur": note.duration,
            "vel": note.velocity,
            "agent_id": note.agent_id,
        },
        sort_keys=True,
    )


class ScoreLogWriter:
    """One JSON object per committed note, in commit order."""

    def __init__(self, stream):
        self.stream = stream

    def write(self, notes):
        for note in notes:
            self.stream.write(score_log_line(note) + "\n")
        self.stream.flush()
