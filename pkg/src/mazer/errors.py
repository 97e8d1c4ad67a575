"""Exception and warning types shared across the package."""


class MazerError(Exception):
    """Base class for all errors raised by this package."""


class DegeneratePoint(MazerError, ValueError):
    """The dressed splitting vanishes (u = 0 and detuning = 0); the mixing angle is undefined."""


class SingularMatching(MazerError, RuntimeError):
    """Boundary-matching linear system is numerically singular."""

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class DomainError(MazerError, ArithmeticError):
    """Evaluation of a mode expression left the real domain (division by zero, sqrt < 0, ...)."""


class ParseError(MazerError, ValueError):
    """Malformed mode expression. ``offset`` is the UTF-8 byte offset of the problem."""

    def __init__(self, message, offset):
        super().__init__(f"{message} (at byte offset {offset})")
        self.message = message
        self.offset = offset


class UnknownIdentifier(ParseError):
    pass


class ArityError(ParseError):
    pass


class StiffnessWarning(RuntimeWarning):
    """Evanescent growth during shooting integration exceeded the safe bound."""


class NonConvergent(RuntimeWarning):
    """Doubling the number of slices changed the emission probability beyond tolerance."""
