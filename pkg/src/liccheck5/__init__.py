"""Numerical verification of a Lorentzian C1 cone-metric family on R^5 and its
twistor-spinor structure: jets, frames, curvature, spin geometry, regularity
probes and a deterministic check suite."""

__version__ = "0.1.0"
