"""Exact quantum duality map for integral laminations on punctured surfaces."""

__version__ = "0.1.0"
