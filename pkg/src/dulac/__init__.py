"""Dulac function construction and Bendixson-Dulac certification for planar systems."""

__version__ = "0.1.0"
