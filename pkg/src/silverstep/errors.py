"""Exception types shared across the library."""


class NumericalFailure(RuntimeError):
    """An iterative numerical kernel failed to converge or produced garbage."""


class DegenerateMatrixError(NumericalFailure):
    """A matrix required to be positive definite has an eigenvalue at or
    below the working floor."""

    def __init__(self, message: str, min_eigenvalue: float | None = None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class DegenerateCovarianceError(DegenerateMatrixError):
    """A covariance update annihilated (or nearly annihilated) a direction.

    ``factor_min_eigenvalue`` is the eigenvalue of the update factor closest
    to zero, which is what kills the direction.
    """

    def __init__(self, message: str, factor_min_eigenvalue: float | None = None):
        super().__init__(message, min_eigenvalue=factor_min_eigenvalue)
        self.factor_min_eigenvalue = factor_min_eigenvalue


class UndefinedLogError(ValueError):
    """The logarithmic map is not defined for this pair of points
    (antipodal or near-antipodal on the sphere)."""


class UndefinedTransportError(UndefinedLogError):
    """Parallel transport is not defined for this pair of points."""


class TangentBaseMismatchError(ValueError):
    """A tangent vector was used at a point other than its base point."""


class ConfigError(ValueError):
    """An experiment configuration file failed validation.

    Carries optional line/field context for CLI diagnostics.
    """

    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        parts = []
        if line is not None:
            parts.append(f"line {line}")
        if field is not None:
            parts.append(f"field '{field}'")
        full = f"{', '.join(parts)}: {message}" if parts else message
        super().__init__(full)
        self.line = line
        self.field = field
