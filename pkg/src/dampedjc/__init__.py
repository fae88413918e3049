"""Exact and approximate dynamics of a qubit in a leaky cavity."""

from .model import DensityKind, ModelParams, SpectralDensity

__all__ = ["DensityKind", "ModelParams", "SpectralDensity"]
