"""Exception types shared by all modules."""


class EKRError(Exception):
    """Base class for every error raised by this package."""


class NotPrime(EKRError, ValueError):
    pass


class OrderTooLarge(EKRError, ValueError):
    pass


class FieldMismatch(EKRError, ValueError):
    pass


class DivisionByZero(EKRError, ZeroDivisionError):
    pass


class TooLarge(EKRError):
    """An enumeration or search would exceed its configured cap."""


class DimensionMismatch(EKRError, ValueError):
    pass


class ProjectCenterItself(EKRError, ValueError):
    pass


class DuplicatePoints(EKRError, ValueError):
    pass


class DegreeTooLarge(EKRError, ValueError):
    pass


class CodeMismatch(EKRError, ValueError):
    pass


class InconsistentConstraints(EKRError):
    """A t-star whose prescribed coordinates admit no codeword."""


class BadParameters(EKRError, ValueError):
    pass


class WeakEKRFails(EKRError):
    """The avoiding hyperplane set is empty, so the whole code is intersecting."""


class ModulePropertyFails(EKRError):
    pass


class NotRegular(EKRError, ValueError):
    pass


class NonnegativeSpectrum(EKRError, ValueError):
    pass


class BadSpectrum(EKRError, ValueError):
    pass


class BadApex(EKRError, ValueError):
    pass


class FormulaMismatch(EKRError):
    pass


class VerificationFailed(EKRError):
    pass


class NotAScheme(EKRError):
    pass


class TableMismatch(EKRError):
    pass


class NotConstant(EKRError):
    pass


class BadRelationSet(EKRError, ValueError):
    pass


class ZeroPolynomial(EKRError, ValueError):
    pass
