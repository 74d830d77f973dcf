"""
Exception hierarchy of the Levi-flat laboratory.

The CLI maps these onto its exit codes and the HTTP routes onto status codes.
"""

from typing import Optional, Tuple


class LFLError(Exception):
    """Base class of every error raised by the laboratory."""


class ConfigError(LFLError, ValueError):
    """Invalid run configuration, file format or command parameters."""


class GridMismatchError(LFLError, ValueError):
    """A field does not live on the grid of the model it is used with."""


class DegreeError(LFLError, ValueError):
    """A differential form has the wrong degree for the requested operation."""


class ModelMismatchError(LFLError, ValueError):
    """The operation is not defined on the given kind of model."""


class NumericalError(LFLError, FloatingPointError):
    """NaN or Inf detected in a computed field."""


class FormConstructionError(LFLError):
    """A form that must be real came out with a significant imaginary part."""


class NotPositiveError(LFLError):
    """
    The curvature matrix fails strict positivity.

    Attributes:
        point: grid multi-index of the worst offending point
        value: minimum eigenvalue found there
    """

    def __init__(self, point: Tuple[int, ...], value: float, message: Optional[str] = None):
        self.point = tuple(int(i) for i in point)
        self.value = float(value)
        super().__init__(
            message or f"Theta is not positive definite at {self.point} (min eigenvalue {self.value:.3e})"
        )
