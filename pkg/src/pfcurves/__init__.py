"""Exact computations for rational curves through marked points on projective
spaces and smooth quadrics, built around Pfaffians of a rescaled skew matrix."""

from __future__ import annotations

__version__ = "0.1.0"
