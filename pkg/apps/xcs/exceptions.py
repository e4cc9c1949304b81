class XcsError(Exception):
    pass
