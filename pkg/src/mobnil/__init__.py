"""Desk-scale workbench for Möbius correlations with polynomial and nilsequence phases."""

__version__ = "0.1.0"
