"""Stability lab for Sobolev spaces, crack-domain PDEs and scattering in the plane."""

__version__ = "0.1.0"
