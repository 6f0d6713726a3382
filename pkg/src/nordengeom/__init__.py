"""Homogeneous almost complex manifolds with Norden metric: curvature, classes, checks."""

__version__ = "0.1.0"
