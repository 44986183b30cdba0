"""Exact computations for degenerating mixed Hodge structures."""

__version__ = "0.1.0"
