"""Convolution powers of complex functions on the integers: symbol analysis, local limits, Carne-type bounds."""

from .zfun import LatticeFunction, power
from .symbol import analyze
from .classify import classify

__all__ = ["LatticeFunction", "power", "analyze", "classify"]
__version__ = "0.1.0"
