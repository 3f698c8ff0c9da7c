"""Exact scales, tidy subgroups and contraction groups for totally disconnected groups."""

from .core import Method, Target, Verdict, membership, modular_value, scale, scale_inverse, tidy
from .errors import TidyScaleError

__version__ = "0.1.0"

__all__ = [
    "Method",
    "Target",
    "TidyScaleError",
    "Verdict",
    "membership",
    "modular_value",
    "scale",
    "scale_inverse",
    "tidy",
]
