"""Exception hierarchy.

Every validation failure raises a subclass of :class:`NordenError`, so callers
(and the CLI) can catch one type and still report which invariant broke.
"""


class NordenError(Exception):
    """Base class for all errors raised by nordengeom."""


class DegenerateMetric(NordenError):
    pass


class SlotOutOfRange(NordenError):
    pass


class AntisymmetryViolation(NordenError):
    pass


class JacobiViolation(NordenError):
    pass


class NotAlmostComplex(NordenError):
    pass


class NotNordenCompatible(NordenError):
    pass


class WrongSignature(NordenError):
    pass


class NotW3(NordenError):
    """Raised by checks that only apply to quasi-Kaehler (W3) models."""


class IsotropicPlane(NordenError):
    pass


class OnlyKahlerSolutions(NordenError):
    pass


class RetriesExhausted(NordenError):
    pass


class NotFound(NordenError):
    pass


class ParseError(NordenError):
    pass
