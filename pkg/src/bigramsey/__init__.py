"""Exact big Ramsey degrees of countable homogeneous binary structures."""

__version__ = "0.1.0"
