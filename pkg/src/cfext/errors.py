"""Exception hierarchy shared across the package."""


class CFError(Exception):
    """Base class for all library errors."""


class ModeError(CFError, TypeError):
    """Exact-rational and complex-float scalars were mixed, or a mode-specific operation was misused."""


class ParseError(CFError, ValueError):
    """Malformed scalar text, source JSON, or job spec."""


class SourceExhausted(CFError, IndexError):
    """A finite coefficient source was asked for a term beyond its length."""


class ContractionError(CFError, ValueError):
    """A contraction or extension precondition fails (e.g. a vanishing b_{2k})."""


class DomainError(CFError, ValueError):
    """Parameters fall outside an operation's domain of validity."""
