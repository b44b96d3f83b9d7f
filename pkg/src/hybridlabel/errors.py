"""Exception hierarchy for the hybridlabel package."""


class HybridLabelError(ValueError):
    """Base class for all domain errors raised by this package."""


# --- label codec ---------------------------------------------------------

class DegenerateIntervalsError(HybridLabelError):
    """A class interval has its lower bound above its upper bound."""


class InvalidSpacingError(HybridLabelError):
    """Spacing multiplier u outside the range allowed by the chosen mode."""


class ClassOutOfRangeError(HybridLabelError):
    """Class index outside 1..n_classes."""


class PropertyOutOfIntervalError(HybridLabelError):
    """Property value outside its class interval during encoding."""

    def __init__(self, message, indices=None):
        super().__init__(message)
        self.indices = list(indices) if indices is not None else []


class NonFiniteInputError(HybridLabelError):
    """NaN or infinite value where a finite real is required."""


class NoOverlapError(HybridLabelError):
    """All class intervals are pairwise disjoint, so an overlapping
    (offset-free) encoding cannot be constructed from them."""


class NotFittedError(HybridLabelError):
    """Estimator used before fit."""


# --- metrics -------------------------------------------------------------

class LengthMismatchError(HybridLabelError):
    """Paired sequences have different lengths."""


class EmptyInputError(HybridLabelError):
    """Operation requires at least one element."""


class ZeroTrueValueError(HybridLabelError):
    """MAPE is undefined when a true value is zero."""


# --- data ----------------------------------------------------------------

class DatasetError(HybridLabelError):
    """Base class for dataset construction/ingestion errors."""


class MissingHeaderError(DatasetError):
    pass


class EmptyFileError(DatasetError):
    pass


class MalformedRowError(DatasetError):
    def __init__(self, message, line):
        super().__init__(f"line {line}: {message}")
        self.line = line


class NonNumericPropertyError(DatasetError):
    def __init__(self, message, line):
        super().__init__(f"line {line}: {message}")
        self.line = line


class IntervalCountMismatchError(DatasetError):
    """Number of property intervals does not match the number of classes."""


class ClassTooSmallError(DatasetError):
    """A class has too few records for a 5:1:1 split."""


# --- neural nets ---------------------------------------------------------

class DimMismatchError(HybridLabelError):
    """Input dimensionality does not match the network's layout."""


class NonFiniteLossError(HybridLabelError):
    """Training loss became NaN/inf; the partial trace is attached."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class InsufficientEpochsError(HybridLabelError):
    """Training-progress guideline needs at least two recorded epochs."""
