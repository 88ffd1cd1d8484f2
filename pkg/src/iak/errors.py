"""Exception types shared across the toolkit."""


class IAKError(Exception):
    """Base class for all toolkit errors."""


class InvalidWord(IAKError):
    """A word uses letters outside the system's alphabet."""


class NoPointAction(IAKError):
    """A point evaluation was requested from a map that only carries Lipschitz data."""


class BudgetExceeded(IAKError):
    """An enumeration would exceed the configured word or point budget."""


class SeriesDiverges(IAKError):
    """A geometric tail constant was requested at an exponent where the series diverges."""


class WrongVariant(IAKError):
    """An operation restricted to one map variant was called on another."""


class EmptyInput(IAKError):
    """An empty point cloud or empty map family was supplied."""


class NotFullDimensional(IAKError):
    """An area-ratio estimate was requested for a condensation set of lower dimension."""


class InvalidInput(IAKError):
    """An argument is outside the operation's documented domain."""


class SceneError(IAKError):
    """A scene file failed to parse or violated a declared invariant."""
