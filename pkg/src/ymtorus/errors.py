"""Exception types shared across the package."""


class YmtError(Exception):
    """Base class for all library errors."""


class NotInSu2(YmtError):
    """Matrix is not anti-Hermitian traceless within tolerance."""


class DegreeMismatch(YmtError):
    """Form degree incompatible with the requested operation."""


class DegreeOverflow(YmtError):
    """Cup product would exceed the top degree of the complex."""


class GridMismatch(YmtError):
    """Operands live on different grids, or an operation needs a 2x2 grid."""


class ParseError(YmtError):
    """Malformed serialized data; carries the offending field when known."""

    def __init__(self, message: str, field: str | None = None):
        if field:
            message = f"{message} (at {field})"
        super().__init__(message)
        self.field = field


class ConfigError(YmtError):
    """Invalid solver or command-line configuration."""
