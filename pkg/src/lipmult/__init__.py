"""Multiplicity of complex algebraic germs by several independent routes."""

__version__ = "0.1.0"

from .poly import Polynomial, parse  # noqa: E402

__all__ = ["Polynomial", "parse", "__version__"]
