"""Exact Newton-Okounkov bodies and filtration invariants for quasi-monomial valuations."""

__version__ = "0.1.0"
