from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from apps.harmony.chords import Style
from apps.harmony.exceptions import CorpusError, ModelError
from apps.harmony.ngram import BACKOFF, ChordSequenceModel
from apps.harmony.training import corpus_files, corpus_tokens, split_held_out


def _source(value):
    style, sep, path = value.partition("=")
    if not sep:
        raise CommandError(f"expected STYLE=PATH, got {value!r}", returncode=1)
    try:
        return Style(style), Path(path)
    except ValueError:
        raise CommandError(f"unknown style {style!r}", returncode=1) from None


class Command(BaseCommand):
    help = "Train the n-gram chord model from style-labelled chord charts"

    def add_arguments(self, parser):
        parser.add_argument("corpora", nargs="*", help="STYLE=PATH pairs (default: the bundled corpora)")
        parser.add_argument("--order", type=int, default=3)
        parser.add_argument("--backoff", type=float, default=BACKOFF)
        parser.add_argument("--out", required=True)

    def handle(self, *args, **options):
        if options["corpora"]:
            sources = [_source(value) for value in options["corpora"]]
        else:
            sources = corpus_files(settings.AMS_ASSETS_DIR / "corpora")
        if options["order"] < 1:
            raise CommandError("--order must be at least 1", returncode=1)

        try:
            streams = corpus_tokens(sources)
        except CorpusError as exc:
            raise CommandError(str(exc), returncode=2) from exc
        except OSError as exc:
            raise CommandError(f"cannot read corpus: {exc}", returncode=2) from exc

        train, held_out = [], []
        for stream in streams:
            head, tail = split_held_out(stream)
            train.extend(head)
            held_out.extend(tail)
        try:
            model = ChordSequenceModel.train(train, options["order"], options["backoff"])
        except ModelError as exc:
            raise CommandError(str(exc), returncode=2) from exc
        model.save(options["out"])

        self.stdout.write(f"vocabulary: {len(model.chord_vocabulary)} chords, {len(model.vocabulary)} tokens")
        if held_out:
            self.stdout.write(f"held-out perplexity: {model.perplexity(held_out):.4f}")
        self.stdout.write(self.style.SUCCESS(f"Chord model written to {options['out']}."))
