"""Exception hierarchy shared by every module."""


class PappusError(Exception):
    """Base class for all library errors."""


class SingularMatrix(PappusError):
    pass


class ZeroVector(PappusError):
    pass


class NotElliptic(PappusError):
    pass


class NotPositiveDefinite(PappusError):
    pass


class ParamOutOfRange(PappusError):
    pass


class DegenerateBox(PappusError):
    pass


class DepthLimit(PappusError):
    pass


class ZeroPolynomial(PappusError):
    pass


class NoPolarity(PappusError):
    pass


class NotInTheta(ParamOutOfRange):
    pass


class InternalError(PappusError):
    pass


class CertificationFailed(PappusError):
    """Raised when a positivity or identity certificate cannot be produced.

    ``witness`` holds a point (dict of variable -> Fraction) where the claim
    was seen to fail, when one is known.
    """

    def __init__(self, message, *, witness=None, index=None):
        super().__init__(message)
        self.witness = witness
        self.index = index
