"""Exception hierarchy shared by every smote_lab module."""


class SmoteLabError(Exception):
    """Base class for all library errors."""


class SampleError(SmoteLabError, ValueError):
    """Malformed sample (ragged, non-finite, wrong shape)."""


class SampleTooSmall(SampleError):
    pass


class IndexOutOfRange(SmoteLabError, IndexError):
    pass


class RankOutOfRange(SmoteLabError, ValueError):
    pass


class InvalidCount(SmoteLabError, ValueError):
    pass


class DomainError(SmoteLabError, ValueError):
    """Argument outside the domain of a function (e.g. quantile level)."""


class EmptySample(SmoteLabError, ValueError):
    pass


class DegenerateSupport(SmoteLabError, ValueError):
    """All values coincide, so no bandwidth / binning can be formed."""


class DegenerateRange(SmoteLabError, ValueError):
    pass


class InsufficientData(SmoteLabError, ValueError):
    pass


class ColumnNotFound(SmoteLabError, KeyError):
    def __init__(self, column, available):
        self.column = column
        self.available = list(available)
        super().__init__(
            f"column {column!r} not found; available columns: {', '.join(map(str, self.available))}"
        )

    def __str__(self):
        return self.args[0]


class ParseError(SmoteLabError, ValueError):
    def __init__(self, message, row=None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)


class EmptyAfterCleaning(SmoteLabError, ValueError):
    pass


class ConfigError(SmoteLabError, ValueError):
    """Validation failure; ``errors`` holds every ``(field_path, message)`` pair."""

    def __init__(self, errors):
        self.errors = list(errors)
        lines = [f"{path}: {msg}" for path, msg in self.errors]
        super().__init__("invalid configuration:\n  " + "\n  ".join(lines))
