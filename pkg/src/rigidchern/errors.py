"""Exception hierarchy shared by every module of the package."""


class RigidChernError(Exception):
    """Base class for all errors raised by rigidchern."""


class ValuationError(RigidChernError, ValueError):
    """An argument does not have the p-adic valuation an operation requires."""


class PrecisionExhausted(RigidChernError, ArithmeticError):
    """Tracked precision would drop to zero."""


class UnsupportedSpace(RigidChernError, ValueError):
    pass


class WindowOverflow(RigidChernError, ValueError):
    """An exponent left the configured window [-D, D]."""


class NotAUnit(RigidChernError, ValueError):
    pass


class NotClosed(RigidChernError, ValueError):
    pass


class NotInSpan(RigidChernError, ValueError):
    pass


class WindowTooSmall(RigidChernError):
    pass


class GaugeMismatch(RigidChernError, ValueError):
    pass
