"""Exception hierarchy shared by every linrew module."""


class LinrewError(Exception):
    """Base class for all errors raised by linrew."""


class DivisionByZero(LinrewError, ZeroDivisionError):
    pass


class IndexOutOfRange(LinrewError, IndexError):
    pass


class FuelExhausted(LinrewError):
    """No fixpoint (or no decision) was reached within the iteration budget."""


class NonTerminatingClosure(LinrewError):
    """A reachable-set enumeration exceeded its node budget."""


class NotSConfluent(LinrewError):
    pass


class StrictFlagRequired(LinrewError):
    """Single-step operations need every rule to satisfy lhs not in supp(rhs)."""


class NotCertified(LinrewError):
    pass


class CyclicOrder(LinrewError):
    pass


class DimensionMismatch(LinrewError):
    pass


class ZeroOperator(LinrewError):
    pass


class NotMonic(LinrewError):
    pass


class NotInU(LinrewError):
    pass


class NotAutoreduced(LinrewError):
    pass


class RoundBudgetExhausted(LinrewError):
    pass


class WindowTooSmall(LinrewError):
    pass


class ValidationError(LinrewError):
    pass


class IncompatibleVerb(LinrewError):
    pass


class ParseError(LinrewError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)
