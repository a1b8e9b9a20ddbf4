"""A checking kernel for XTT, a cubical type theory with definitional UIP."""

__version__ = "0.1.0"
