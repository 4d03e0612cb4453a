"""Exception types shared across the package."""


class RydchainError(Exception):
    """Base class for all package errors."""


class InvalidSize(RydchainError):
    """Chain length is not a positive integer."""


class SizeLimitExceeded(RydchainError):
    """Requested Hilbert space exceeds the supported dimension guard."""


class BasisMismatch(RydchainError):
    """Operands live on incompatible Hilbert bases."""


class ZeroDistance(RydchainError):
    """Two atoms coincide; the van der Waals coupling diverges."""


class ConvergenceFailure(RydchainError):
    """Krylov propagation could not reach the requested tolerance."""


class ConstraintViolation(RydchainError):
    """An operation would push amplitude out of the blockade-constrained space."""


class InvalidDensity(RydchainError):
    """Matrix is not a valid single-qubit density matrix."""


class NonPhysicalDensity(InvalidDensity):
    """Reconstructed density matrix has a negative eigenvalue."""


class WeightSumInvalid(RydchainError):
    """Ensemble weights are negative or do not sum to one."""


class WindowTooSmall(RydchainError):
    """Site window has fewer than two sites."""


class GridTooSmall(RydchainError):
    """Spatio-temporal grid is too small for the requested analysis."""


class UndefinedAngle(RydchainError):
    """Bloch vector leaves the YZ plane; its rotation angle is undefined."""


class TableInvalid(RydchainError):
    """Microstate table contains negative counts or out-of-basis configurations."""


class ConfigInvalid(RydchainError):
    """Protocol configuration is inconsistent with the system."""


class ShapeMismatch(RydchainError):
    """Grids do not share a common shape."""


class ApproximationInvalid(RydchainError):
    """Requested correction lies outside its regime of validity."""


class NonPhysical(RydchainError):
    """Inverse detection correction produced strongly unphysical populations."""


class ParseError(RydchainError):
    """Config file is not valid JSON (or contains duplicate keys)."""


class ValidationError(RydchainError):
    """Config parsed but violates the schema; message lists all violations."""

    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))
