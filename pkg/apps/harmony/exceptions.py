class HarmonyError(Exception):
    pass


class CorpusError(HarmonyError):
    def __init__(self, token, line, path=None):
        where = f"{path}:{line}" if path else f"line {line}"
        super().__init__(f"unrecognised chord {token!r} on {where}")
        self.token = token
        self.line = line
        self.path = path


class ModelError(HarmonyError):
    """Bad rank, untrained model or a model file that cannot be read."""


class MatrixError(HarmonyError):
    pass
