"""Simulation and analysis toolkit for one-dimensional excited and
excited-asymmetric random walks and their backwards branching-like process."""

__version__ = "0.1.0"

from . import analysis, bbp, kernels, params, series, walk
from .params import (
    CookieVector,
    WalkClass,
    WalkConfig,
    WalkKind,
    classify,
    delta,
    excited_asymmetric_walk,
    excited_walk,
    parse_config,
    simple_walk,
)

__all__ = [
    "__version__",
    "analysis",
    "bbp",
    "kernels",
    "params",
    "series",
    "walk",
    "CookieVector",
    "WalkClass",
    "WalkConfig",
    "WalkKind",
    "classify",
    "delta",
    "excited_asymmetric_walk",
    "excited_walk",
    "parse_config",
    "simple_walk",
]
