"""Exception hierarchy shared by all scuq modules."""


class ScuqError(Exception):
    """Base class for every error raised by scuq."""


class InputError(ScuqError, ValueError):
    """Malformed or insufficient input data (too few nodes, duplicates, ...)."""


class ConfigurationError(ScuqError, ValueError):
    """A method/law/parameter combination that cannot be honoured."""


class DomainRangeError(ScuqError, ValueError):
    """Evaluation requested outside the domain a surrogate was built on."""


class StateError(ScuqError, RuntimeError):
    """Non-physical solver state (vacuum, negative pressure, negative depth).

    Carries the offending cell index and simulation time when known.
    """

    def __init__(self, message, cell=None, time=None):
        self.reason = message
        details = []
        if cell is not None:
            details.append(f"cell={cell}")
        if time is not None:
            details.append(f"t={time:.6g}")
        if details:
            message = f"{message} ({', '.join(details)})"
        super().__init__(message)
        self.cell = cell
        self.time = time
