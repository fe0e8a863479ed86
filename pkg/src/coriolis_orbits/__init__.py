"""
Periodic orbits emanating from equilibria of rotating-frame Newtonian systems.

Submodules
----------
linalg
    Characteristic polynomials, sign-change root counts and Morse indices.
spectrum
    The matrices ``A`` and ``S_T`` of the linearized problem and their Morse-index tables.
classify
    Eigenvalue regions, characteristic periods and bifurcation numbers.
degree
    Brouwer degrees of planar fields by winding numbers.
rt4bp
    The restricted triangular four-body problem.
dynamics
    Hamiltonian flow, periodic-orbit shooting and continuation.
cli
    Command-line interface.
"""

from .classify import EquilibriumReport, Region, SpectralData, emanation_report, gamma2, gamma3, region
from .rt4bp import MassTriple, analyze, find_librations

__version__ = "0.1.0"

__all__ = [
    "EquilibriumReport",
    "Region",
    "SpectralData",
    "emanation_report",
    "gamma2",
    "gamma3",
    "region",
    "MassTriple",
    "analyze",
    "find_librations",
    "__version__",
]
