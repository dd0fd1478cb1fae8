"""Numerical toolkit for ground states of (-Δ)^s u = g'(u) on R^N with zero mass."""

__version__ = "0.1.0"
