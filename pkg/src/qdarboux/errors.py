"""Exception hierarchy shared by all modules."""


class QDarbouxError(Exception):
    """Base class for every error raised by the library."""


class DomainError(QDarbouxError, ValueError):
    """A value left the domain where a formula is real and finite.

    ``index`` is the offending lattice index when the failure is tied to one.
    """

    def __init__(self, message, index=None):
        if index is not None:
            message = f"{message} (lattice index {index})"
        super().__init__(message)
        self.index = index


class MovablePoleError(DomainError):
    """The Backlund denominator ``1 + t*J(x)`` vanishes or changes sign."""


class DegenerateRatioError(DomainError):
    """Two of the four values entering a cross-ratio coincide."""


class NonConvergedError(QDarbouxError, ArithmeticError):
    """A truncated series or product still has a non-negligible tail."""

    def __init__(self, message, last_term):
        super().__init__(f"{message} (last term magnitude {float(last_term):.3e})")
        self.last_term = last_term


class ParseError(QDarbouxError, ValueError):
    """Syntax error in a potential expression."""

    def __init__(self, message, offset, expected=()):
        exp = ""
        if expected:
            exp = "; expected one of: " + ", ".join(sorted(expected))
        super().__init__(f"{message} at offset {offset}{exp}")
        self.offset = offset
        self.expected = frozenset(expected)


class UnboundParameterError(QDarbouxError, KeyError):
    """An expression references a parameter with no binding."""

    def __str__(self):
        return f"unbound parameter {self.args[0]!r}"


class SeedValidationError(QDarbouxError, ValueError):
    """A seed function does not solve the Riccati equation it claims to."""

    def __init__(self, message, residual, index):
        super().__init__(f"{message}: residual {float(residual):.3e} at lattice index {index}")
        self.residual = residual
        self.index = index
