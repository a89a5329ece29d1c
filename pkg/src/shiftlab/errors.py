"""Exception hierarchy for shiftlab.

Every error raised on purpose by the library derives from
:class:`ShiftlabError`, so callers (the CLI in particular) can separate
operational failures from genuine bugs.
"""


class ShiftlabError(Exception):
    """Base class for all library errors."""


class IndexBeyondMaterialized(ShiftlabError, IndexError):
    """A weight index lies past the materialized part of a sequence."""


class InsufficientDepth(ShiftlabError):
    """The construction (or horizon) is too shallow for the request."""


class DepthTooLarge(ShiftlabError):
    """Building the requested depth would exceed the memory budget."""


class RangeViolatesPrecondition(ShiftlabError, ValueError):
    """An index range falls outside the window an estimate is stated for."""


class ZeroVector(ShiftlabError, ValueError):
    pass


class ScanBudgetExceeded(ShiftlabError):
    """A run-compressed scan would need more candidate points than allowed."""


class PrecisionBudgetExceeded(ShiftlabError, ArithmeticError):
    """Exact alignment of two scaled rationals would need too many bits."""


class RegionSystemMismatch(ShiftlabError, TypeError):
    pass


class HorizonExceedsPeriod(ShiftlabError, ValueError):
    """A rotation query reaches the period of its rational angle."""


class NonInjectiveSystem(ShiftlabError, ValueError):
    pass


class FixedPointInput(ShiftlabError, ValueError):
    pass


class LengthMismatch(ShiftlabError, ValueError):
    pass


class FormatError(ShiftlabError, ValueError):
    """An input file does not follow one of the documented JSON formats."""
