from .chords import ChordSymbol, Style
from .exceptions import CorpusError

COMMENT = "%"


def ingest_corpus(text, style):
    """
    Turns a chord chart into a token stream. Every barline (and every line
    end) becomes the style token; consecutive style tokens collapse into one.

    >>> ingest_corpus("C | G7 | C", "folk")
    ['C:maj', 'folk', 'G:dom7', 'folk', 'C:maj']
    """
    style = Style(style)
    tokens = []

    def barline():
        if tokens and tokens[-1] != style.value:
            tokens.append(style.value)

    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith(COMMENT):
            continue
        barline()
        for i, bar in enumerate(line.split("|")):
            if i:
                barline()
            for symbol in bar.split():
                try:
                    tokens.append(ChordSymbol.parse(symbol).token)
                except ValueError:
                    raise CorpusError(symbol, line_no) from None
    return tokens
