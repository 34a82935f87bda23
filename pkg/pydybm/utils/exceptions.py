"""Exceptions raised by pydybm.

Every error derives from :class:`DyBMError` and from the builtin exception
that best describes it, so callers may catch either.
"""


class DyBMError(Exception):
    """Base class of pydybm errors"""


class DimensionError(DyBMError, ValueError):
    """A vector or matrix does not have the expected length or shape"""


class InvalidParameterError(DyBMError, ValueError):
    """A parameter lies outside its admissible range"""


class DomainError(DyBMError, ValueError):
    """An input pattern is outside the domain of the model (e.g. not binary)"""


class BoundaryError(DyBMError, IndexError):
    """A window does not fit inside the recorded stream"""


class ConfigError(DyBMError, ValueError):
    """The configuration is incomplete, unknown or inconsistent"""


class SnapshotError(DyBMError, ValueError):
    """A snapshot file is empty, corrupt or of an unsupported version"""


class NumericDivergenceError(DyBMError, ArithmeticError):
    """A prediction or an update became non-finite

    :param message: diagnostic message
    :type message: str
    :param run: index of the run that diverged, if known
    :type run: int, optional
    :param step: step (1-based) at which the divergence was detected, if known
    :type step: int, optional
    """

    def __init__(self, message, run=None, step=None):
        self.run = run
        self.step = step
        details = []
        if run is not None:
            details.append("run " + str(run))
        if step is not None:
            details.append("step " + str(step))
        if len(details) > 0:
            message = message + " (" + ", ".join(details) + ")"
        super().__init__(message)
