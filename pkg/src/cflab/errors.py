"""Exception hierarchy shared by every module."""


class CFLabError(Exception):
    """Base class for all library errors."""


class InvalidMatrix(CFLabError, ValueError):
    pass


class NotHermitian(CFLabError, ValueError):
    pass


class NotPSD(CFLabError, ValueError):
    pass


class NotContraction(CFLabError, ValueError):
    pass


class DimensionCap(CFLabError, ValueError):
    pass


class ArityMismatch(CFLabError, ValueError):
    pass


class NonCommuting(CFLabError, ValueError):
    pass


class BudgetExceeded(CFLabError, ValueError):
    pass


class DegreeTooHigh(CFLabError, ValueError):
    pass


class NonzeroConstant(CFLabError, ValueError):
    pass


class FactorizationFailed(CFLabError, ArithmeticError):
    pass


class PreconditionFailed(CFLabError, ValueError):
    pass


class Infeasible(CFLabError, ValueError):
    pass


class NotInClass(CFLabError, ValueError):
    pass


class WindowMismatch(CFLabError, ValueError):
    pass


class WindowTooSmall(CFLabError, ValueError):
    pass


class DegreeOverflow(CFLabError, ArithmeticError):
    """Raised when a recursion produces a symbol of unexpected degree (a bug)."""


class SpectrumTooSparse(CFLabError, ValueError):
    pass


class ParseError(CFLabError, ValueError):
    pass
