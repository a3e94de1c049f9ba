class ForestFireError(Exception):
    """Base class for all errors raised by forest_fire"""


class ValidationError(ForestFireError, ValueError):
    """Input data is malformed (non-finite values, shape or row-count mismatch)"""


class ParameterError(ForestFireError, ValueError):
    """A numeric or flag parameter is outside its valid range"""


class ContractViolation(ForestFireError, RuntimeError):
    """An internal precondition was not met"""


class MetricUndefinedError(ForestFireError, ValueError):
    """The requested metric has no value for the given labeling"""
