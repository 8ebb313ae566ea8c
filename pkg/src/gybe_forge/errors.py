"""Exception types raised across the package."""


class GybeError(Exception):
    """Base class for all package errors."""


class DimensionError(GybeError, ValueError):
    pass


class SingularParameterError(GybeError, ValueError):
    pass


class IncompleteBlockMapError(GybeError, KeyError):
    pass


class InvalidPatternError(GybeError, ValueError):
    pass


class UnsupportedDimensionError(GybeError, ValueError):
    pass


class GuardExceededError(GybeError, MemoryError):
    pass


class UnknownTargetError(GybeError, KeyError):
    pass


class UnknownFamilyError(GybeError, KeyError):
    pass
