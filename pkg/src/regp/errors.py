"""Exception types shared across the package."""


class RegpError(Exception):
    """Base class for all package errors."""


class RangeError(RegpError, ValueError):
    """Argument outside the validated domain of a routine."""


class BracketError(RegpError, ValueError):
    """Root search interval does not bracket a sign change."""


class QuadratureError(RegpError, RuntimeError):
    """Numerical integration did not reach the requested tolerance."""

    def __init__(self, message, *, estimate=None, error=None, interval=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error
        self.interval = interval

    def __str__(self):
        base = super().__str__()
        extra = []
        if self.interval is not None:
            extra.append(f"interval={self.interval}")
        if self.estimate is not None:
            extra.append(f"estimate={self.estimate:.6g}")
        if self.error is not None:
            extra.append(f"abserr={self.error:.3g}")
        return f"{base} ({', '.join(extra)})" if extra else base


class DivergenceError(RegpError, ValueError):
    """Requested quantity diverges for the given parameters."""


class NonclassicalInputError(RegpError, ValueError):
    """A nonclassical state was passed where only classical ones are simulable."""


class SeedError(RegpError, ValueError):
    """Seeds violate an independence requirement."""


class SchemaError(RegpError, ValueError):
    """Input file does not match the expected CSV schema."""

    def __init__(self, message, *, path=None, line=None, column=None):
        self.path = path
        self.line = line
        self.column = column
        loc = []
        if path is not None:
            loc.append(str(path))
        if line is not None:
            loc.append(f"line {line}")
        if column is not None:
            loc.append(f"column {column!r}")
        super().__init__(f"{': '.join([', '.join(loc), message]) if loc else message}")
