"""Exact-rational workbench for central crossed modules of Lie algebras."""

__version__ = "0.1.0"
