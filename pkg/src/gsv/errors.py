"""Exception types raised across the package."""


class GSVError(Exception):
    """Base class for every error raised by :mod:`gsv`."""


class NotDivisible(GSVError, ArithmeticError):
    """Exact polynomial division left a nonzero remainder."""


class NonMinorDenominator(GSVError, ArithmeticError):
    """A division would produce a denominator that is not a product of minors."""


class PolySyntaxError(GSVError, SyntaxError):
    def __init__(self, message, text="", pos=0):
        super().__init__(f"{message} at position {pos}")
        self.text = text
        self.pos = pos


class ShapeMismatch(GSVError, ValueError):
    pass


class InvalidSpec(GSVError, ValueError):
    pass


class NotOnVariety(GSVError, ValueError):
    def __init__(self, message, entry=None, residual=None):
        super().__init__(message)
        self.entry = entry
        self.residual = residual


class SingularSpecialization(GSVError, ZeroDivisionError):
    pass


class NotOrthonormalRows(GSVError, ValueError):
    pass


class NotUnit(GSVError):
    """A gluing factor turned out not to be +1 or -1."""


class SingularGroupElement(GSVError, ValueError):
    pass


class DegenerateComplement(GSVError):
    pass


class NonTrivialCanonicalWeight(GSVError):
    pass


class NonTrivialSigmaWeight(GSVError):
    pass


class BudgetExceeded(GSVError):
    pass
