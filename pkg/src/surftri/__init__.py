"""Triangulated surfaces as signed rotation systems, and spanning spheres with holes inside them."""

__version__ = "0.1.0"
