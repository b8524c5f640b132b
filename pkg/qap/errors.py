"""Exception types shared by the solver, harness and CLI"""


class QAPError(Exception):
    """Base class for every error raised by this package"""


class InstanceFormatError(QAPError, ValueError):
    """QAPLIB text could not be parsed into an instance"""


class DimensionError(QAPError, ValueError):
    """A permutation or matrix does not match the instance size"""


class SolutionError(QAPError, ValueError):
    """Solution file is malformed, not a bijection, or states the wrong cost"""


class InstanceTooLargeError(QAPError, ValueError):
    """Instance is too large for exhaustive enumeration"""


class MissingBestKnownError(QAPError, ValueError):
    """Quality targets were requested for an instance without a best-known cost"""


class UnknownTargetError(QAPError, KeyError):
    """A quality target was queried that the runs never recorded"""


class RunLogError(QAPError, ValueError):
    """Run-log file has an unknown schema or mixes incompatible runs"""


class InstanceNotFoundError(QAPError, FileNotFoundError):
    """Instance name could not be resolved to a file"""


class CurveFileError(QAPError, ValueError):
    """Curve table is malformed or inconsistent with its siblings"""
