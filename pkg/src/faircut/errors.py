"""Exception types shared across the faircut solvers."""


class FaircutError(Exception):
    """Base class for all faircut errors."""


class DimensionError(FaircutError):
    """Dimensions of measures, regions or search spaces do not match."""


class PrecisionError(FaircutError):
    """A numerical procedure could not reach the requested accuracy."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class ContractError(FaircutError):
    """A caller-supplied map violated a required symmetry contract."""


class NoZeroFound(FaircutError):
    """The equivariant search exhausted its budget before reaching tolerance.

    This signals insufficient resolution or violated preconditions, never
    that no zero exists when the symmetry hypotheses hold.
    """

    def __init__(self, message, best_residual=None, details=None):
        super().__init__(message)
        self.best_residual = best_residual
        self.details = details or {}


class QuantileError(FaircutError):
    """Quantile inversion failed to bracket a root (degenerate reference)."""


class InstanceTooLarge(FaircutError):
    """Instance exceeds the exhaustive-search budget."""


class UnsupportedShape(FaircutError):
    """The cut-vector shape is not supported by this operation."""


class Unsupported(FaircutError):
    """Feature intentionally out of scope (exposed as a rejecting stub)."""


class NotAdmissible(FaircutError):
    """Chessboard counts fail the parity admissibility criterion."""


class NonConvergence(FaircutError):
    """Fixed-point capacity inversion did not converge."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class CertificateFailed(FaircutError):
    """A non-existence scan could not establish a positive margin.

    Signals that the instance parameters (not the underlying claim) are at
    fault, e.g. measures too close together or grid too coarse.
    """

    def __init__(self, message, best_residual=None, witness=None):
        super().__init__(message)
        self.best_residual = best_residual
        self.witness = witness


class BudgetExceeded(FaircutError):
    """Enumeration exceeded the declared candidate budget."""
