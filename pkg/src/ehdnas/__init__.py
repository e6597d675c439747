"""Desk-scale hardware-aware differentiable architecture search toolkit."""

__version__ = "0.1.0"
