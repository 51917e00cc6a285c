"""Exception classes for the quantum gradient toolkit."""


class QADError(Exception):
    """Base exception for all qad_gradients operations."""
    pass


class PauliError(QADError):
    """Raised for malformed Pauli words, sums or non-Hermitian input."""
    pass


class CircuitError(QADError):
    """Raised when a circuit or PQC is invalid or exceeds the simulator cap."""
    pass


class GroupingError(QADError):
    """Raised when a grouping cannot be measured the requested way."""
    pass


class NotPSRCompatible(QADError):
    """Raised when a generator does not have exactly two distinct eigenvalues."""
    pass


class GradientError(QADError):
    """Raised for invalid gradient requests (indices, methods, assignments)."""
    pass


class CostModelError(QADError):
    """Raised when the cost model receives unknown methods or incomplete tables."""
    pass


class ConfigurationError(QADError):
    """Raised when configuration is invalid."""
    pass


class DataError(QADError):
    """Raised when input files (PQC JSON, graphs, datasets) cannot be parsed."""
    pass
