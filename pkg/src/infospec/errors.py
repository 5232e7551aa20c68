"""Exception hierarchy shared by every module."""


class InfospecError(Exception):
    """Base class for all errors raised by infospec."""


class InputError(InfospecError, ValueError):
    """Malformed arguments: wrong lengths, out-of-range symbols, bad parameters."""


class ModelFormatError(InputError):
    """A model description file failed to parse or validate."""


class UndefinedPointError(InputError):
    """A density was requested at an output sequence with zero marginal probability."""


class DomainError(InputError):
    """A parameter lies outside the interval on which the quantity is defined."""


class CapacityError(InfospecError, RuntimeError):
    """Exact enumeration would exceed the configured budget."""
