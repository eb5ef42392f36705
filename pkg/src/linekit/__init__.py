"""Geometry of the space of oriented lines in Euclidean 3-space."""

from .errors import (ConfigError, DomainError, LinekitError, NumericalError)
from .linespace import (FLIPPED, STANDARD, OrientedLine, TangentT,
                        line_from_point_direction, phi)

__version__ = "0.1.0"

__all__ = [
    "ConfigError", "DomainError", "LinekitError", "NumericalError",
    "FLIPPED", "STANDARD", "OrientedLine", "TangentT",
    "line_from_point_direction", "phi",
]
