"""Exception hierarchy shared by all modules.

Every error carries a short machine-readable ``code`` so the CLI can emit
``{"error": code, "message": ...}`` without string matching.
"""


class NodalArcsError(Exception):
    code = "Error"


class InvalidParameters(NodalArcsError, ValueError):
    code = "InvalidParameters"


class ZeroInput(NodalArcsError, ValueError):
    code = "ZeroInput"


class NotInMu(NodalArcsError, ValueError):
    code = "NotInMu"


class SingularPoint(NodalArcsError, ValueError):
    code = "SingularPoint"


class NotACosetRep(NodalArcsError, ValueError):
    code = "NotACosetRep"


class OrderTooSmall(NodalArcsError, ValueError):
    code = "OrderTooSmall"


class ConstructionUncertified(NodalArcsError):
    code = "ConstructionUncertified"


class NotFound(NodalArcsError):
    code = "NotFound"


class NotAnArc(NodalArcsError, ValueError):
    code = "NotAnArc"


class NotACap(NodalArcsError, ValueError):
    code = "NotACap"


class CenterNotACenter(NodalArcsError, ValueError):
    code = "CenterNotACenter"


class InternalAssertionFailure(NodalArcsError, AssertionError):
    code = "InternalAssertionFailure"
