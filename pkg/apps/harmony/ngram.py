"""
Style-conditioned chord n-gram model with stupid backoff.

The style token doubles as the barline marker, so a context such as
(jazz, D:min7, G:dom7) both conditions on the style and on the bar position.
"""
import json
import logging
import math
import struct
from collections import Counter, defaultdict
from pathlib import Path
from typing import Protocol

from .chords import ChordSymbol, Style, is_style_token, token_order
from .exceptions import ModelError

logger = logging.getLogger(__name__)

BACKOFF = 0.4
MAGIC = b"AMSC"
FORMAT_VERSION = 1
_HEADER = struct.Struct(">4sHHI")
# floor for tokens outside the vocabulary when scoring held-out text
OOV_PROBABILITY = 1e-6


class ChordPredictor(Protocol):
    def next_chord(self, history, style, rank=1):
        """Returns (ChordSymbol, confidence) for the rank-th most likely next chord."""


def _as_token(item):
    if isinstance(item, ChordSymbol):
        return item.token
    if isinstance(item, Style):
        return item.value
    return str(item)


class ChordSequenceModel:
    def __init__(self, order, counts, backoff=BACKOFF):
        if order < 1:
            raise ModelError("order must be at least 1")
        if not counts.get(()):
            raise ModelError("model has no unigram table")
        self.order = order
        self.backoff = backoff
        self.counts = counts
        self._totals = {ctx: sum(table.values()) for ctx, table in counts.items()}
        self.vocabulary = sorted(counts[()], key=token_order)
        self.chord_vocabulary = [t for t in self.vocabulary if not is_style_token(t)]

    @classmethod
    def train(cls, tokens, order=3, backoff=BACKOFF):
        tokens = [_as_token(t) for t in tokens]
        if not tokens:
            raise ModelError("cannot train on an empty token stream")
        if order < 1:
            raise ModelError("order must be at least 1")
        counts = defaultdict(Counter)
        for i, token in enumerate(tokens):
            for n in range(0, min(order, i) + 1):
                counts[tuple(tokens[i - n:i])][token] += 1
        logger.info("trained order-%d chord model on %d tokens, %d contexts", order, len(tokens), len(counts))
        return cls(order, {ctx: dict(table) for ctx, table in counts.items()}, backoff)

    # ---------------------------------------------------------------- queries

    def context(self, history, style=None):
        tokens = [_as_token(t) for t in history]
        if style is not None:
            tokens = [Style(style).value] + tokens
        return tuple(tokens[-self.order:]) if tokens else ()

    def probability(self, token, context):
        """Maximum-likelihood P(token | context) at the deepest observed suffix."""
        for ctx in self._suffixes(tuple(context)):
            table = self.counts.get(ctx)
            if table:
                return table.get(token, 0) / self._totals[ctx]
        return 0.0

    def score(self, token, context):
        """Stupid-backoff score; not a normalised probability."""
        factor = 1.0
        for ctx in self._suffixes(tuple(context)):
            table = self.counts.get(ctx)
            if table and table.get(token):
                return factor * table[token] / self._totals[ctx]
            if table:
                factor *= self.backoff
        return 0.0

    def _suffixes(self, context):
        context = context[-self.order:] if context else ()
        return [context[i:] for i in range(len(context) + 1)]

    def _chord_table(self, context):
        for ctx in self._suffixes(context):
            table = self.counts.get(ctx)
            if table and any(not is_style_token(t) for t in table):
                return ctx, table
        raise ModelError("model has no chord continuations")

    def ranked_chords(self, history, style):
        """All chord symbols with their confidences, most likely first."""
        context = self.context(history, style)
        _, table = self._chord_table(context)
        total = sum(c for t, c in table.items() if not is_style_token(t))
        ranked = sorted(
            self.chord_vocabulary,
            key=lambda t: (-table.get(t, 0) / total, -self.score(t, context), token_order(t)),
        )
        return [(ChordSymbol.from_token(t), table.get(t, 0) / total) for t in ranked]

    def next_chord(self, history, style, rank=1):
        if rank < 1 or rank > len(self.chord_vocabulary):
            raise ModelError(f"rank {rank} outside 1..{len(self.chord_vocabulary)}")
        return self.ranked_chords(history, style)[rank - 1]

    def bar_ends(self, history, style):
        """True when the style token (barline) is the most probable next token."""
        context = self.context(history, style)
        barline = self.probability(Style(style).value, context)
        best_chord = max((self.probability(t, context) for t in self.chord_vocabulary), default=0.0)
        return barline > 0 and barline >= best_chord

    def perplexity(self, tokens):
        tokens = [_as_token(t) for t in tokens]
        if not tokens:
            raise ModelError("cannot score an empty token stream")
        log_sum = 0.0
        for i, token in enumerate(tokens):
            context = tuple(tokens[max(0, i - self.order):i])
            scores = {t: self.score(t, context) for t in self.vocabulary}
            total = sum(scores.values())
            p = scores.get(token, 0.0) / total if total else 0.0
            log_sum += math.log(max(p, OOV_PROBABILITY))
        return math.exp(-log_sum / len(tokens))

    # ------------------------------------------------------------ persistence

    def to_payload(self):
        return {
            "order": self.order,
            "backoff": self.backoff,
            "counts": [
                [list(ctx), sorted(table.items(), key=lambda kv: token_order(kv[0]))]
                for ctx, table in sorted(self.counts.items(), key=lambda kv: (len(kv[0]), kv[0]))
            ],
        }

    def save(self, path):
        payload = json.dumps(self.to_payload(), sort_keys=True, separators=(",", ":")).encode("utf-8")
        Path(path).write_bytes(_HEADER.pack(MAGIC, FORMAT_VERSION, self.order, len(payload)) + payload)

    @classmethod
    def load(cls, path):
        data = Path(path).read_bytes()
        if len(data) < _HEADER.size:
            raise ModelError(f"{path}: truncated model file")
        magic, version, order, size = _HEADER.unpack_from(data)
        if magic != MAGIC:
            raise ModelError(f"{path}: not a chord model file")
        if version != FORMAT_VERSION:
            raise ModelError(f"{path}: unsupported model version {version}")
        body = data[_HEADER.size:]
        if len(body) != size:
            raise ModelError(f"{path}: payload size mismatch")
        try:
            payload = json.loads(body)
            counts = {tuple(ctx): {t: int(c) for t, c in table} for ctx, table in payload["counts"]}
        except (ValueError, KeyError, TypeError) as exc:
            raise ModelError(f"{path}: corrupt payload ({exc})") from exc
        return cls(order, counts, payload.get("backoff", BACKOFF))
