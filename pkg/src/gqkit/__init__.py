"""Geometric quantization and foliated cohomology toolkit."""

__version__ = "0.1.0"
