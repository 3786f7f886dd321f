"""Exception hierarchy shared across the package."""


class CondScreenError(Exception):
    """Base class for all package errors."""


class ConstantExposure(CondScreenError, ValueError):
    pass


class TableMismatch(CondScreenError, ValueError):
    pass


class IndexOutOfRange(CondScreenError, IndexError):
    pass


class InvalidCutoff(CondScreenError, ValueError):
    pass


class InvalidData(CondScreenError, ValueError):
    pass


class UnsupportedScenario(CondScreenError, ValueError):
    pass


class EmptyActiveSet(CondScreenError, ValueError):
    pass


class InconsistentDimensions(CondScreenError, ValueError):
    pass


class ConfigError(CondScreenError, ValueError):
    pass


class ParseError(CondScreenError, ValueError):
    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


class MissingColumn(CondScreenError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "missing column"


class NonFiniteValue(ParseError):
    pass
