"""Exception types raised by the library."""


class PrecisionError(ArithmeticError):
    """Base class for failures caused by finite precision."""


class DivisionByZeroAtPrecision(PrecisionError, ZeroDivisionError):
    pass


class InsufficientPrecision(PrecisionError):
    pass


class TailNotConvergent(PrecisionError):
    pass


class NoSuchSlope(ArithmeticError):
    pass


class ContractionFailure(PrecisionError):
    pass


class OutsideLogDomain(ArithmeticError):
    pass


class OutsideNeighborhood(ArithmeticError):
    pass


class SingularHead(ArithmeticError):
    pass


class ShapeError(ValueError):
    pass


class ZeroParameter(ValueError):
    pass
