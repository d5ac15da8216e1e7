"""Exception hierarchy shared by every ugto module."""


class UgtoError(Exception):
    """Base class for all toolkit errors."""


class ConllParseError(UgtoError):
    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:"
        if line is not None:
            where += f"{line}: "
        elif where:
            where += " "
        super().__init__(f"{where}{message}")


class UsageError(UgtoError, ValueError):
    """Inputs violate an operation's preconditions."""


class ConfigError(UgtoError, ValueError):
    pass


class UndefinedRateError(UgtoError, ValueError):
    """Raised by word_rate for a word with no occurrences."""


class LexiconError(UgtoError):
    pass


class ClusterParseError(UgtoError):
    pass


class NumericalError(UgtoError, ArithmeticError):
    pass


class TrainingError(UgtoError, RuntimeError):
    pass


class ModelFormatError(UgtoError):
    pass


class UnsupportedVersionError(ModelFormatError):
    pass
