"""Exception hierarchy shared by every module."""


class SwitchSynthError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(SwitchSynthError, ValueError):
    """Inconsistent matrix dimensions or an invalid configuration value."""


class InputError(SwitchSynthError, ValueError):
    """A call argument is outside the operation's domain."""


class DomainError(InputError):
    """A state lies outside the region where a model is defined."""


class PreconditionError(SwitchSynthError):
    """A model does not satisfy the assumptions an algorithm relies on."""


class NumericalError(SwitchSynthError, ArithmeticError):
    """A numerical routine failed to converge."""


class SynthesisError(SwitchSynthError):
    """Schedule synthesis could not complete.

    The partially built report is attached so callers can inspect the
    decisions that were taken before the failure.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
