class OscDecodeError(Exception):
    """Malformed datagram. `offset` is the byte position where parsing gave up."""

    def __init__(self, reason, offset):
        super().__init__(f"{reason} (at byte {offset})")
        self.reason = reason
        self.offset = offset


class OscBindError(OSError):
    pass
