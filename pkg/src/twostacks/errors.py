"""Exception types shared across the package."""


class TwoStacksError(Exception):
    """Base class for all errors raised by this package."""


class IllegalMove(TwoStacksError):
    """A machine move whose precondition (nonempty source container) fails."""


class InvalidAlphabet(TwoStacksError):
    """A word contains letters outside the expected two-letter alphabet."""


class ResourceLimit(TwoStacksError):
    """An enumeration exceeded its configured memory budget."""


class SeriesFormatError(TwoStacksError):
    """A series or estimate file could not be parsed."""


class SingularFit(TwoStacksError):
    """The linear system of an approximant fit is rank-deficient, or the
    normalised unknown is forced to zero."""


class RecurrenceBreakdown(TwoStacksError):
    """The leading recurrence factor vanished at some prediction index."""

    def __init__(self, index, message=None):
        super().__init__(message or f"leading recurrence factor vanishes at index {index}")
        self.index = index


class EnsembleTooSmall(TwoStacksError):
    """Fewer than the required number of approximants survived fitting."""


class IndexMismatch(TwoStacksError):
    """Two series overlap on too few indices to be compared."""


class GammaPole(TwoStacksError):
    """Gamma-function prefactor requested at a non-positive integer argument."""


class DegenerateWindow(TwoStacksError):
    """An extrapolation window with no spread in the abscissa."""


class FixtureUnknown(TwoStacksError):
    """An unrecognised verification fixture name."""
