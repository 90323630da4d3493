"""Multiscale finite elements for Helmholtz problems with sign-changing coefficients."""

__version__ = "0.1.0"
