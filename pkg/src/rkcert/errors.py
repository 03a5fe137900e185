"""Exception hierarchy shared by all rkcert modules."""


class RKCertError(Exception):
    """Base class for every error raised by rkcert."""


class InputError(RKCertError, ValueError):
    """An argument violates a documented precondition."""


class DimensionError(InputError):
    """A matrix or vector has the wrong shape."""


class NumericalError(RKCertError, ArithmeticError):
    """A numerical routine failed to converge or produced non-finite output."""


class SpectrumError(InputError):
    """The spectrum of a matrix does not satisfy a required stability property."""


class NotAsymptoticallyStable(SpectrumError):
    """Raised by the staircase index when an uncoupled skew-Hermitian block remains.

    Attributes:
        residual_block: the trailing skew-Hermitian block ``J_rr`` of the staircase form.
    """

    def __init__(self, message, residual_block=None):
        super().__init__(message)
        self.residual_block = residual_block


class NotExplicitError(InputError):
    """A Butcher tableau is not strictly lower triangular."""


class InconsistentSchemeError(InputError):
    """The stability polynomial does not satisfy R(0) = 1."""


class WitnessNotFound(RKCertError):
    """No vector satisfies the witness conditions at the requested level."""


class InsufficientDataError(RKCertError):
    """Too few usable points to fit a short-time exponent."""
