"""Exception hierarchy.

Validation errors map to CLI exit code 2, numerical failures to 3 and
I/O failures to 4.
"""


class DissipWeylError(Exception):
    exit_code = 1


class ValidationError(DissipWeylError, ValueError):
    exit_code = 2


class NumericalError(DissipWeylError, ArithmeticError):
    exit_code = 3


class IoError(DissipWeylError, OSError):
    exit_code = 4


class DegreeTooLarge(ValidationError):
    pass


class NonPositiveArgument(ValidationError):
    pass


class NonPositiveScale(ValidationError):
    pass


class NotCaseB(ValidationError):
    """Damping is not strictly larger than 1 everywhere on the boundary."""


class NoEigenvalue(NotCaseB):
    pass


class NoCrossing(ValidationError):
    pass


class EmptyWindow(ValidationError):
    pass


class DegenerateGrid(ValidationError):
    pass


class ExpressionSyntaxError(ValidationError):
    """Malformed damping expression; ``offset`` is the 0-based character position."""

    def __init__(self, message, offset):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class UnknownIdentifier(ValidationError):
    def __init__(self, name, offset):
        super().__init__(f"unknown identifier {name!r} at offset {offset}")
        self.name = name
        self.offset = offset


class BracketFailure(NumericalError):
    pass


class LmaxInsufficient(NumericalError):
    pass


class QuadratureNonconvergent(NumericalError):
    pass


class VanishingRho(NumericalError):
    pass


class OracleDepthExceeded(NumericalError):
    pass
