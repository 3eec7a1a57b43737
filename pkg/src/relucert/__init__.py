"""Relucert: find and certify spurious local minima of two-layer ReLU networks."""

__version__ = "0.1.0"
