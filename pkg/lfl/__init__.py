"""Levi-flat laboratory: Diederich-Fornaess exponents on foliated torus models."""

__version__ = "1.0.0"
