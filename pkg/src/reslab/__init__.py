"""Resolvent continuation toolkit for the rank-two symmetric space SL(3,R)/SO(3)."""

__version__ = "0.1.0"
