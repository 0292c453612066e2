"""Exception hierarchy.

Every error carries a short ``kind`` slug so the command line front end can
print a single machine-parsable line.
"""


class BMOMError(Exception):
    kind = "error"


class DomainError(BMOMError, ValueError):
    """An argument lies outside the domain of the operation."""

    kind = "domain"


class DegenerateSpreadError(DomainError):
    kind = "degenerate-spread"


class InsufficientDataError(BMOMError, ValueError):
    kind = "insufficient-data"


class ZeroVarianceError(BMOMError, ValueError):
    """Residual sum of squares is zero, so no density can be built."""

    kind = "zero-variance"


class IllPosedDesignError(BMOMError, ValueError):
    kind = "ill-posed-design"

    def __init__(self, message, columns=()):
        super().__init__(message)
        self.columns = tuple(columns)


class DimensionError(BMOMError, ValueError):
    kind = "dimension"


class PositivityError(BMOMError, ValueError):
    kind = "positivity-violation"


class MomentUndefinedError(BMOMError, ValueError):
    kind = "moment-undefined"

    def __init__(self, message, moment=None):
        super().__init__(message)
        self.moment = moment


class NumericalError(BMOMError, ArithmeticError):
    kind = "numeric"

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class DataError(BMOMError, ValueError):
    """Malformed or missing input data (CSV parsing and column selection)."""

    kind = "data"
