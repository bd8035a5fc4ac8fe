"""Exception types shared across the toolkit."""


class StockfireError(Exception):
    """Base class for all toolkit errors."""


class DomainError(StockfireError, ValueError):
    """An argument is outside the domain an operation accepts."""


class ConsistencyError(DomainError):
    """Two parameters that must agree do not (e.g. f_doc vs. decay constant)."""


class ParseError(StockfireError):
    """A key-value file could not be parsed or failed validation.

    Carries the offending ``key`` and 1-based ``line`` when known so the
    message can point at the exact spot in the file.
    """

    def __init__(self, message, *, path=None, line=None, key=None):
        self.path = path
        self.line = line
        self.key = key
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append(str(line))
        prefix = ":".join(where)
        if key is not None:
            message = f"{key}: {message}"
        super().__init__(f"{prefix}: {message}" if prefix else message)
