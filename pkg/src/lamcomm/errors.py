"""Exception types raised across the package."""


class LamcommError(Exception):
    """Base class for all package errors."""


class NotHermitian(LamcommError, ValueError):
    def __init__(self, residual: float):
        super().__init__(f"matrix is not Hermitian (relative residual {residual:.3e})")
        self.residual = residual


class NotPSD(LamcommError, ValueError):
    def __init__(self, margin: float):
        super().__init__(f"matrix is not positive semidefinite (min eigenvalue {margin:.3e})")
        self.margin = margin


class NotPositiveDefinite(LamcommError, ValueError):
    def __init__(self, margin: float):
        super().__init__(f"matrix is not positive definite (min eigenvalue {margin:.3e})")
        self.margin = margin


class NotPSDInput(LamcommError, ValueError):
    """A family check received a non-PSD coefficient matrix."""


class NoConvergence(LamcommError, RuntimeError):
    pass


class NotOrthonormal(LamcommError, ValueError):
    def __init__(self, residual: float):
        super().__init__(f"basis columns are not orthonormal (residual {residual:.3e})")
        self.residual = residual


class NotInvariant(LamcommError, ValueError):
    def __init__(self, residual: float):
        super().__init__(f"subspace is not invariant (residual {residual:.3e})")
        self.residual = residual


class ZeroScale(LamcommError, ValueError):
    pass


class MismatchedLambda(LamcommError, ValueError):
    pass


class BadRecipe(LamcommError, ValueError):
    pass


class DegeneratePair(LamcommError, ValueError):
    """AB and BA both vanish, so no scalar is determined."""


class NotLambdaCommuting(LamcommError, ValueError):
    def __init__(self, message: str, residual: float = float("inf")):
        super().__init__(message)
        self.residual = residual


class InvalidCertificate(LamcommError, ValueError):
    pass


class UnknownTheorem(LamcommError, KeyError):
    def __str__(self):
        return f"unknown theorem id {self.args[0]!r}"


class MatrixFileError(LamcommError, ValueError):
    """Malformed matrix JSON document."""
