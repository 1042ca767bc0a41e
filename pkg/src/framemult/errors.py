"""Exception types raised by framemult."""


class FrameError(Exception):
    """Base class for all framemult errors."""


class SchemaError(FrameError, ValueError):
    """Input data does not match the frame/system schema (shapes, types)."""


class PreconditionError(FrameError, ValueError):
    """An operation was called outside its hypotheses."""


class CapacityError(FrameError):
    """Exhaustive computation requested beyond the enumeration cutoff."""

    def __init__(self, n, cutoff):
        self.n = n
        self.cutoff = cutoff
        super().__init__(
            f"exact enumeration needs N <= {cutoff} (got N = {n}); "
            "use randomized_constant for larger systems"
        )


class NumericalError(FrameError, ArithmeticError):
    """The eigensolver produced results outside its accuracy guarantees."""


class SearchFailure(FrameError):
    """A randomized search exhausted its budget without finding a witness."""
