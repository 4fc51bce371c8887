"""Canard explosion and slow invariant manifolds of planar singularly perturbed systems."""

__version__ = "0.1.0"
