"""Exception and warning types shared across the package."""


class DimensionMismatchError(ValueError):
    """Operands carry different truncation orders or vector lengths."""


class DomainError(ValueError):
    """A value lies outside its mathematical domain (|a| >= 1, broken symmetry, ...)."""


class ConfigError(ValueError):
    """A configuration object is unusable (empty grid, bad radius, ...)."""


class DegenerateInputError(ValueError):
    """An operation that needs a nonzero signal received (numerically) zero."""


class TruncationError(ArithmeticError):
    """Truncation order too small for the requested operation to stay accurate."""


class IngestError(ValueError):
    """Input file could not be parsed or violates the input contract."""


class RecordFormatError(ValueError):
    """A stored decomposition record is malformed or has the wrong version."""


class InvariantViolation(RuntimeError):
    """A recorded decomposition fails one of its internal consistency checks."""


class SpanDegeneracyError(RuntimeError):
    """Candidate atom is (numerically) inside the span of the current frame.

    This is a signal rather than a failure: selection routines catch it and
    escalate the candidate to the next multiplicity order.
    """

    def __init__(self, message, r=0.0):
        super().__init__(message)
        self.r = float(r)


class TruncationWarning(UserWarning):
    """Atom decay and truncation order mismatch degrades unit norms."""
