"""Entropy dimension, small integer polynomials and witness sets in C^n."""
__version__ = "0.1.0"
