class ContextError(Exception):
    """Base class for concept graph failures."""


class ProtocolError(ContextError):
    """A game message breaks the graph's rules (bad range, kind clash, self-loop)."""


class ConceptNotFound(ContextError, LookupError):
    pass
