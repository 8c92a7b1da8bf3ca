"""Exception types shared across the package."""


class TnqsimError(Exception):
    """Base class for all errors raised by this package."""


class ShapeError(TnqsimError):
    """Tensor extents are incompatible with the requested operation."""


class CapacityError(TnqsimError):
    """A dense state vector would exceed the qubit-count guard."""


class GateError(TnqsimError):
    """A gate matrix failed validation (wrong shape, or not unitary)."""


class NumericError(TnqsimError):
    """A linear-algebra backend failed; never swallowed silently."""


class QasmError(TnqsimError):
    """Malformed OpenQASM input. Carries the source position when known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "")
            message = f"{where}: {message}"
        super().__init__(message)


class UnsupportedFeatureError(QasmError):
    """Syntactically valid OpenQASM 2.0 outside the supported subset."""
