"""Exception hierarchy shared by every glacalc module."""


class GLAError(Exception):
    """Base class for all errors raised by glacalc."""


class RingError(GLAError):
    """Arithmetic failure in the coefficient ring (zero division, bad index, ...)."""


class ParseError(GLAError):
    """Malformed expression or definition-file text.

    ``line`` and ``column`` are 1-based when known.
    """

    def __init__(self, message, line=None, column=None):
        self.message = message
        self.line = line
        self.column = column
        where = []
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        prefix = ", ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class AlgebraError(GLAError):
    """Malformed or inconsistent algebra data."""


class FormError(GLAError):
    """Arity, degree or algebra mismatch on exterior forms."""


class SubspaceError(GLAError):
    """Degenerate generating set or invalid ideal specification."""


class InternalCheckError(GLAError):
    """A self-check that can only fail through an implementation bug."""
