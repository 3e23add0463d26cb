"""Exception types shared across the package."""


class DomainError(ValueError):
    """Input outside the domain of an operation."""


class ParseError(ValueError):
    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}: "
        elif where:
            where += " "
        super().__init__(where + message)


class NotMoebiusEquivalent(ValueError):
    """Two metrics whose cross-ratios disagree (derivative is not well defined)."""


class NotMoebius(ValueError):
    """A boundary map that fails to preserve cross-ratios.

    ``witness`` is the offending quadruple and ``values`` the two log
    cross-ratios (before, after).
    """

    def __init__(self, message, witness=None, values=None):
        self.witness = witness
        self.values = values
        super().__init__(message)


class UndecidedAtPrecision(ArithmeticError):
    """Interval arithmetic could not decide a comparison at the requested precision."""

    def __init__(self, message, precision):
        self.precision = precision
        super().__init__(message)


class SurjectivityViolation(AssertionError):
    """Exact tree projection left a positive gap."""


class ProjectionNotConverged(RuntimeError):
    def __init__(self, message, diagnostics=None):
        self.diagnostics = diagnostics or {}
        super().__init__(message)


class InternalConsistencyError(RuntimeError):
    """Two evaluations that must agree did not."""
