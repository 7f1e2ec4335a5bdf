"""Orbit counting for the modular group and the class-number identities behind it."""

from .exceptions import DomainError, QuadratureError, ResourceCapError
from .moebius import BallEntry, GroupElement, HPoint, count_N, enumerate_ball
from .quadforms import BinaryQF
from .pairs import FormPair, class_count_h
from .kernels import KernelParams

__version__ = "0.1.0"

__all__ = [
    "BallEntry",
    "BinaryQF",
    "DomainError",
    "FormPair",
    "GroupElement",
    "HPoint",
    "KernelParams",
    "QuadratureError",
    "ResourceCapError",
    "class_count_h",
    "count_N",
    "enumerate_ball",
    "__version__",
]
