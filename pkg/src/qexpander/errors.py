"""Exception hierarchy shared by every module."""


class QExpanderError(Exception):
    """Base class for all package errors."""


class DimensionError(QExpanderError, ValueError):
    pass


class DomainError(QExpanderError, ValueError):
    pass


class PreconditionError(QExpanderError, ValueError):
    pass


class ValidationError(QExpanderError, ValueError):
    """Malformed input data: files, graphs, unitaries."""


class ResourceError(QExpanderError, MemoryError):
    pass


class DegenerateChannel(QExpanderError):
    """Reduced spectral radius is (numerically) zero: the map is a perfect mixer."""

    def __init__(self, message, rho=0.0):
        super().__init__(message)
        self.rho = rho


class ContractViolation(QExpanderError, RuntimeError):
    """A guaranteed inequality failed at runtime.

    ``diagnostics`` carries the intermediate quantities for replay.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})
