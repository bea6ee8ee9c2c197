"""Shared exception types."""


class SubcircuitError(Exception):
    """Base class for all package errors."""


class DimensionMismatchError(SubcircuitError):
    """Operands act on different numbers of qubits."""


class CapacityLimitError(SubcircuitError):
    """Requested computation exceeds the configured dense/desk-scale budget."""


class SynthesisValidityError(SubcircuitError):
    """Pulse-time formulas were evaluated outside their validity range."""


class UnsupportedEncodingError(SubcircuitError):
    """Operation is defined only for a subset of the fermionic encodings."""


class InfeasibleTargetError(SubcircuitError):
    """No step size in the admissible range meets the requested error target."""


class QuadratureError(SubcircuitError):
    """Numerical integration failed to converge to the requested tolerance."""


class FitRankError(SubcircuitError):
    """Design matrix of a least-squares fit is rank deficient."""
