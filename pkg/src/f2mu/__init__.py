"""Nontermination certificates for first-order rewriting, checked in a second-order type system with fixed points."""

__version__ = "0.1.0"
