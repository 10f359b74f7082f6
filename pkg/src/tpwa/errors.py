"""Exception hierarchy shared by all tpwa modules."""


class TpwaError(Exception):
    """Base class for every error raised by tpwa."""


class DimensionMismatch(TpwaError, ValueError):
    pass


class EmptyIndexSet(TpwaError, ValueError):
    pass


class OutOfDomain(TpwaError):
    """No piece region contains the query point."""


class SolverFailure(TpwaError):
    """The LP backend did not reach an optimal solution."""


class NotIncompatible(TpwaError, ValueError):
    """A certificate was requested for an index set that admits an affine fit."""


class InvalidCertificate(TpwaError, ValueError):
    pass


class BudgetExceeded(TpwaError):
    """An oracle enumeration would exceed its configured budget."""


class SingularDenominator(TpwaError, ValueError):
    pass


class InfeasibleInstance(TpwaError):
    """Some data points belong to no compatible index set.

    ``uncovered`` lists the offending 1-based indices.
    """

    def __init__(self, uncovered, message=None):
        self.uncovered = tuple(int(k) for k in uncovered)
        if message is None:
            message = f"no compatible index set contains points {list(self.uncovered)}"
        super().__init__(message)
