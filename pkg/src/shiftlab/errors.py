"""Exception hierarchy shared by every shiftlab module."""


class ShiftlabError(Exception):
    """Base class for all errors raised by shiftlab."""


class DomainError(ShiftlabError, ValueError):
    """Operands live in different groups, alphabets or point sets."""


class CapExceeded(ShiftlabError):
    """An exhaustive computation would exceed the configured size cap."""


class HypothesisFailure(ShiftlabError):
    """A precondition of a conditional construction does not hold."""


class StageFailure(ShiftlabError):
    """A staged pipeline could not complete one of its stages.

    ``stage`` identifies the failing stage (an index or a name).
    """

    def __init__(self, stage, message):
        super().__init__(f"stage {stage}: {message}")
        self.stage = stage
        self.detail = message
