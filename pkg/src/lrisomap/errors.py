"""Exception types shared across the package."""


class ArgumentError(ValueError):
    """An argument violates an operation's precondition."""


class FormatError(ValueError):
    """A file or payload does not parse as the declared format."""


class DegenerateInputError(ValueError):
    """Input is structurally unusable (e.g. duplicate points at distance zero)."""


class NumericalError(ArithmeticError):
    """A numerical routine cannot produce a trustworthy result."""


class ResourceError(RuntimeError):
    """The requested computation exceeds the supported problem scale."""
