"""Discrete-time group actions on SU(2) as stroboscopic maps of the Bloch equation."""

from . import bloch, groupmap, sphere, su2
from .bloch import DriveField, integrate, strobe_check
from .errors import (
    IntegrationError,
    InvalidParameterError,
    NumericalInstabilityError,
    OutOfRangeError,
    StrobeError,
    UnsupportedInputError,
)
from .groupmap import MapState, QSequence
from .sphere import SphereConfig, Trajectory, bounds, closure_index, r_curve, r_strobe

__version__ = "0.1.0"
