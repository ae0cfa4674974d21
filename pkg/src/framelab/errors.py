"""Exception types shared across the package."""


class FrameLabError(Exception):
    """Base class for all framelab errors."""


class DimensionMismatchError(FrameLabError):
    """Operands live in different ambient dimensions or have misaligned shapes."""


class NotSelfAdjointError(FrameLabError):
    """A matrix expected to be self-adjoint is not, beyond tolerance."""


class NotPositiveDefiniteError(FrameLabError):
    """A matrix expected to be positive definite is singular or indefinite."""

    def __init__(self, message, lambda_min=None):
        super().__init__(message)
        self.lambda_min = lambda_min


class NotAFrameError(FrameLabError):
    """Lower frame bound vanishes; reconstruction is not defined."""

    def __init__(self, message, lower=None, upper=None):
        super().__init__(message)
        self.lower = lower
        self.upper = upper


class CoefficientError(FrameLabError):
    """Coefficient block lies outside its subspace beyond tolerance."""


class AtomMismatchError(FrameLabError):
    """Two families that must share atoms (masses/weights/points) do not."""
