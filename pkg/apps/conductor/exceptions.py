class ConductorError(Exception):
    pass


class ConfigError(ConductorError):
    def __init__(self, message, errors=None):
        super().__init__(message)
        self.errors = errors or {}


class TraceError(ConductorError):
    def __init__(self, message, line=None):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line
