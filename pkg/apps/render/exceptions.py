class RenderError(Exception):
    pass


class MidiSerializationError(RenderError):
    pass


class SinkUnavailable(RenderError):
    pass
