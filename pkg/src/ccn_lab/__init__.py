"""Coefficients, simulations and solitary waves for the characteristic Cross-Newell phase equation."""
from .coeffs import CoeffBundle, ccn_bundle, characteristics, fluxes_closed
from .errors import CCNError
from .msys import build_rgl_system, check_structure
from .rolls import DomainClass, Wavenumber, classify, solve_roll

__version__ = "0.1.0"
