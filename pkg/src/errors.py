class DyadError(Exception):
    """Base error for dyadic sensing pipeline failures."""


class ConfigError(DyadError):
    """Invalid or missing configuration."""

    def __init__(self, message: str = "", key: str = "", line: int = 0):
        super().__init__(message)
        self.key = key
        self.line = line


class ParseError(DyadError):
    """Input parsing failure."""


class ValidationError(DyadError):
    """Record validation failure."""


class DomainError(DyadError, ValueError):
    """Argument outside the domain of a pure operation."""


class ProtocolError(DyadError):
    """Illegal trigger state machine transition."""


class CrossReferenceError(DyadError):
    """A record points at a session that does not exist."""


class StratificationError(DyadError):
    """Fold assignment cannot give every fold both classes."""

    def __init__(self, message: str = "", target: str = ""):
        super().__init__(message)
        self.target = target


class StageError(DyadError):
    """Pipeline stage failure with the stage and session that caused it."""

    def __init__(self, stage: str, session_id: str = "", cause: Exception = None):
        detail = f"stage={stage}"
        if session_id:
            detail += f" session={session_id}"
        if cause is not None:
            detail += f": {cause}"
        super().__init__(detail)
        self.stage = stage
        self.session_id = session_id
        self.cause = cause
