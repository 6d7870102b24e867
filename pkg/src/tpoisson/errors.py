"""Exception hierarchy shared by the library and the command line."""


class TPError(Exception):
    """Base class for all library errors."""


class ConfigurationError(TPError):
    """Invalid global parameters, e.g. a non-prime characteristic."""


class UsageError(TPError):
    """Arguments that violate an operation's preconditions."""


class ResourceError(TPError):
    """A configured size or enumeration budget would be exceeded."""


class ParseError(UsageError):
    """Malformed element expression; ``position`` is a 0-based offset."""

    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class DecompositionError(TPError):
    """The unital/nilpotent splitting could not be carried out over F_p."""


class InternalError(TPError):
    """A verified invariant failed; indicates a bug, not bad input."""
