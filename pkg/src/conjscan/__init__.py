"""Conjugate-point criterion for steady 2D Euler flows on the flat torus."""

from .kernels import BACKEND
from .torus import (
    GeometryMismatchError,
    NotDivergenceFreeError,
    TorusGeometry,
    TrigScalar,
    VectorField,
    eval_at,
    l2_inner,
    trig_from_modes,
    trig_product,
)

__version__ = "0.1.0"
