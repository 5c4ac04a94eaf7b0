"""
Module: exceptions
Description: Exception hierarchy shared by the model, analysis and pipeline packages
"""

from typing import Any, Optional


class MNWError(Exception):
    """Base class for all errors raised by this package"""


class ParameterError(MNWError, ValueError):
    """Invalid model, experiment or function parameters"""


class GraphFormatError(MNWError, ValueError):
    """Malformed graph file or edge list"""


class InsufficientDataError(MNWError, ValueError):
    """Not enough records to perform a fit"""


class ResourceCapError(MNWError):
    """
    A measurement would exceed a configured resource cap

    Attributes:
        cap_name: Name of the settings field that was exceeded
        cap_value: Configured value of that cap
        requested: Size that was requested
    """

    def __init__(self, cap_name: str, cap_value: Any, requested: Optional[Any] = None) -> None:
        self.cap_name = cap_name
        self.cap_value = cap_value
        self.requested = requested
        detail = f" (requested {requested})" if requested is not None else ""
        super().__init__(f"resource cap '{cap_name}={cap_value}' exceeded{detail}")


class ConvergenceError(MNWError):
    """An iterative computation hit its iteration cap"""

    def __init__(self, cap_name: str, cap_value: int, message: str = "") -> None:
        self.cap_name = cap_name
        self.cap_value = cap_value
        suffix = f": {message}" if message else ""
        super().__init__(f"no convergence within '{cap_name}={cap_value}'{suffix}")
