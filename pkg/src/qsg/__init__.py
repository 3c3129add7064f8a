"""Certifying toolkit for robust Sylvester-Gallai configurations of quadrics."""

__version__ = "0.1.0"
