"""Exception hierarchy shared by every module of the package."""


class PathGhzError(Exception):
    """Base class for all package errors."""


class ConfigurationError(PathGhzError, ValueError):
    """Inputs that do not share a mode universe, or a malformed run config.

    ``path`` names the offending config field (dotted) when known.
    """

    def __init__(self, message, path=None):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class ValidationError(PathGhzError, ValueError):
    """A parameter violates a documented invariant."""


class NumericalCheckError(PathGhzError):
    """A numerical invariant failed; ``invariant`` names it."""

    def __init__(self, invariant, message):
        self.invariant = invariant
        super().__init__(f"[{invariant}] {message}")


class ZeroVectorError(NumericalCheckError):
    def __init__(self, message="cannot normalize the zero vector"):
        super().__init__("nonzero-norm", message)


class StructuralMismatchError(NumericalCheckError):
    def __init__(self, message, extra=()):
        self.extra = tuple(extra)
        super().__init__("ghz-structure", message)


class DimensionGuardError(PathGhzError, ValueError):
    """The dense oracle refused an instance that is too large."""
