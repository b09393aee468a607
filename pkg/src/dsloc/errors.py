"""Exception hierarchy shared by every module of the engine."""


class DslocError(Exception):
    """Base class for all engine errors."""


class PresentationError(DslocError):
    """Operands live in different algebras, or a variable is unknown."""


class NotInvertibleError(DslocError):
    pass


class ParseError(DslocError):
    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class DerivationError(DslocError):
    """A derivation was built with images of the wrong parity."""


class ContainmentError(DslocError):
    """A subspace that should sit inside another does not."""


class WindowTooSmallError(DslocError):
    def __init__(self, message, monomial=None):
        self.monomial = monomial
        super().__init__(message)


class HypothesisFailure(DslocError):
    """A geometric precondition (ideal stability, vanishing, ...) failed."""

    def __init__(self, message, witness=None):
        self.witness = witness
        super().__init__(message)


class UnstableResultError(DslocError):
    pass


class ConfigError(DslocError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "")
            message = f"{where}: {message}"
        super().__init__(message)
