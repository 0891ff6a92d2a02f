"""Exception hierarchy shared by all modules."""


class EgsumsError(Exception):
    """Base class for every error raised by this package."""


class DomainError(EgsumsError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class TargetOutOfRange(EgsumsError, ValueError):
    """The target cannot be certified to lie in the representable interval."""


class NoFeasibleChoice(EgsumsError):
    """No element of a choice set keeps the residual inside the next span."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class ConditionNotCertified(EgsumsError):
    """A required tail condition could not be certified at some index."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class EnumerationCapExceeded(EgsumsError):
    """An enumeration would exceed the configured size cap."""

    def __init__(self, message, size=None, cap=None):
        super().__init__(message)
        self.size = size
        self.cap = cap


class SearchCapExceeded(EgsumsError):
    """A bounded search ran out of steps before finding an answer."""


class ToleranceUnreachable(EgsumsError):
    """The requested tolerance was not met within the configured stage cap."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved
