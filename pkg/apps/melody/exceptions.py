class MelodyError(Exception):
    pass


class OperatorError(MelodyError):
    pass


class EncodingError(MelodyError):
    pass


class ThemeFormatError(MelodyError):
    def __init__(self, message, path=None):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
