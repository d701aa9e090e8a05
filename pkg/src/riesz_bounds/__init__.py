"""Riesz means of Dirichlet-Laplacian spectra and improved Berezin-Li-Yau bounds."""
from . import bounds, geometry, riesz, special_functions, spectra, verify
from .bounds import BoundReport
from .geometry import Ball, Box, Domain, EvalConfig, GeomStats, Interval, Polygon
from .riesz import counting, riesz_mean
from .special_functions import LTConstant, lt_constant
from .spectra import Spectrum

__all__ = [
    "bounds", "geometry", "riesz", "special_functions", "spectra", "verify",
    "BoundReport", "Ball", "Box", "Domain", "EvalConfig", "GeomStats", "Interval", "Polygon",
    "counting", "riesz_mean", "LTConstant", "lt_constant", "Spectrum",
]
