"""Exception types raised by oialab."""


class OIAError(Exception):
    """Base class for every error raised by the library."""


class InvalidSpecError(OIAError, ValueError):
    """Inputs violate a documented precondition (shape, sign, range)."""


class NumericalError(OIAError, ArithmeticError):
    """A numerical routine failed.

    Parameters
    ----------
    operation : str
        Name of the library operation that failed. The CLI prints it on
        stderr.
    message : str
        Human-readable detail.
    residual : float, optional
        Achieved residual or tolerance when the failure is a
        non-convergence.
    """

    def __init__(self, operation, message, residual=None):
        self.operation = operation
        self.residual = residual
        detail = f"{operation}: {message}"
        if residual is not None:
            detail += f" (achieved {residual:.3e})"
        super().__init__(detail)
