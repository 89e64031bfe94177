"""Relative K-theory for *-homomorphisms: cycles, their maps, and exact
sequences computed on finite-dimensional and sampled algebras."""

__version__ = "0.1.0"
