"""Spectral classification of weighted shift operators over Morse-Smale maps."""
from .classifier import (annulus, circles, classify, classify_full, classify_simplex,
                         reduced_coefficient, spectral_radius_estimate)
from .graph import MSGraph, decompose, discover_edges, orientation, simplex_graph, to_dot
from .kernels import BACKEND
from .verdicts import Annulus, Classification, Kernel, Provenance, Range, Status

__version__ = "0.1.0"

__all__ = [
    "Annulus", "BACKEND", "Classification", "Kernel", "MSGraph", "Provenance", "Range", "Status",
    "annulus", "circles", "classify", "classify_full", "classify_simplex", "decompose",
    "discover_edges", "orientation", "reduced_coefficient", "simplex_graph",
    "spectral_radius_estimate", "to_dot",
]
