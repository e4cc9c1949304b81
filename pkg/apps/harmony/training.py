import logging
from pathlib import Path

from .chords import Style
from .corpus import ingest_corpus
from .exceptions import CorpusError, ModelError
from .ngram import BACKOFF, ChordSequenceModel

logger = logging.getLogger(__name__)

CORPUS_SUFFIX = ".txt"


def corpus_files(directory):
    """(style, path) for every `<style>.txt` chart in `directory`."""
    found = []
    for path in sorted(Path(directory).glob(f"*{CORPUS_SUFFIX}")):
        try:
            found.append((Style(path.stem), path))
        except ValueError:
            logger.warning("skipping %s: %r is not a style", path, path.stem)
    return found


def corpus_tokens(sources):
    """Token streams of each (style, path) source, each opened by its style token."""
    streams = []
    for style, path in sources:
        style = Style(style)
        try:
            tokens = ingest_corpus(Path(path).read_text(encoding="utf-8"), style)
        except CorpusError as exc:
            raise CorpusError(exc.token, exc.line, path) from None
        if tokens:
            streams.append([style.value, *tokens])
    return streams


def split_held_out(stream, fraction=0.1):
    cut = len(stream) - max(1, int(len(stream) * fraction))
    return stream[:cut], stream[cut:]


def train_model(sources, order=3, backoff=BACKOFF):
    tokens = [t for stream in corpus_tokens(sources) for t in stream]
    if not tokens:
        raise ModelError("corpora contain no chords")
    return ChordSequenceModel.train(tokens, order, backoff)


def load_or_train(model_path, corpus_dir, order=3, backoff=BACKOFF):
    if model_path:
        model = ChordSequenceModel.load(model_path)
        logger.info("loaded order-%d chord model from %s", model.order, model_path)
        return model
    return train_model(corpus_files(corpus_dir), order, backoff)
