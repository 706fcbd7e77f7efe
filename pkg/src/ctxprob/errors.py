"""Exception hierarchy shared by all ctxprob modules."""


class CtxProbError(Exception):
    """Base class for every error raised by ctxprob."""


class InvalidModel(CtxProbError, ValueError):
    """A model parametrization violates one of its invariants.

    ``invariant`` names the violated rule so callers (and the sweep command)
    can report it without parsing the message.
    """

    invariant = "invalid-model"

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class DegenerateA(InvalidModel):
    invariant = "DegenerateA"


class RangeError(InvalidModel):
    invariant = "RangeError"


class EmptyInput(CtxProbError, ValueError):
    pass


class UndefinedRate(CtxProbError, ZeroDivisionError):
    """A conditional rate was requested for an empty branch (N_r = 0)."""


class MissingTilde(CtxProbError, LookupError):
    """No auxiliary (M_C-only) ensemble was accumulated."""


class ZeroDenominator(CtxProbError, ZeroDivisionError):
    pass


class ConfigError(CtxProbError, ValueError):
    pass
