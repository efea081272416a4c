"""Exception and warning types raised across the package."""


class SeriationError(Exception):
    """Base class for all errors raised by specorder."""


class InvalidDimension(SeriationError, ValueError):
    pass


class InvalidParameter(SeriationError, ValueError):
    pass


class NotMonotone(InvalidParameter):
    """Circulant coefficients increase somewhere on the first half."""


class DimensionMismatch(SeriationError, ValueError):
    pass


class ZeroDegree(SeriationError, ValueError):
    pass


class NotConnected(SeriationError):
    """The positive-entry graph of a similarity matrix has several components.

    Attributes
    ----------
    components : list of ndarray
        Index sets of the connected components, sorted by smallest member.
    """

    def __init__(self, components, message=None):
        self.components = [list(map(int, c)) for c in components]
        if message is None:
            message = "similarity graph is not connected (%d components)" % len(
                self.components
            )
        super().__init__(message)

    @property
    def n_components(self):
        return len(self.components)


class NoConvergence(SeriationError, ArithmeticError):
    pass


class DegenerateAngle(SeriationError, ValueError):
    pass


class DegenerateNeighborhood(SeriationError, ValueError):
    pass


class MergeIncomplete(SeriationError):
    """Merging stopped with more than one sub-ordering left.

    The partial result is kept in ``partition`` so callers can still use it.
    """

    def __init__(self, partition):
        self.partition = [list(map(int, c)) for c in partition]
        super().__init__(
            "merging halted with %d disconnected sub-orderings" % len(self.partition)
        )


class IntervalViolation(SeriationError, ArithmeticError):
    pass


class ParseError(SeriationError, ValueError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = " (line %d" % line
            if column is not None:
                where += ", column %d" % column
            where += ")"
        super().__init__(message + where)


class NotBijective(SeriationError, ValueError):
    pass


class AsymmetryWarning(UserWarning):
    pass


class DisconnectedWarning(UserWarning):
    pass
