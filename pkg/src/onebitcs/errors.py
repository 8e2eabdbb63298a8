"""Exception types shared across the package."""


class OneBitCSError(Exception):
    """Base class for all errors raised by this package."""


class SingularGram(OneBitCSError):
    """A Gram matrix is numerically singular (non-positive pivot).

    Attributes
    ----------
    pivot_index : int
        Index of the failing Cholesky pivot.
    pivot : float
        Value of the failing pivot.
    lam : float or None
        Regularization parameter of the solve that failed, when raised
        from inside an active-set solver.
    active : ndarray or None
        Active-set indices of the solve that failed, when available.
    """

    def __init__(self, message, pivot_index, pivot, lam=None, active=None):
        super().__init__(message)
        self.pivot_index = pivot_index
        self.pivot = pivot
        self.lam = lam
        self.active = active


class ShapeError(OneBitCSError):
    """Problem shape does not match the decoder's requirements."""


class ActiveSetOverflow(OneBitCSError):
    """The candidate active set has more entries than measurements."""

    def __init__(self, message, lam=None, active_size=None):
        super().__init__(message)
        self.lam = lam
        self.active_size = active_size


class DegenerateScale(OneBitCSError):
    """The model scale constant is (numerically) zero, so the signal
    direction is unidentifiable."""


class EmptyPath(OneBitCSError):
    """No usable point on the continuation path (nothing to select from)."""


class MaxIterExceeded(OneBitCSError):
    """Iterative solver hit its iteration cap before reaching tolerance.

    Attributes
    ----------
    residual : float
        Fixed-point residual at the last iterate.
    """

    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual
