"""Time-spectral resolvent analysis of periodic dynamical systems."""

__version__ = "0.1.0"
