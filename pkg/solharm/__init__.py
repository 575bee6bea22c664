"""Numerical construction of a positive nonconstant harmonic function on Sol₃."""

__version__ = '0.1.0'
