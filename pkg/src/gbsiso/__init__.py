"""Refute or confirm graph isomorphism from photon-number cumulants of
graph-encoded Gaussian boson samplers."""

__version__ = "0.1.0"
