"""Entanglement entropy of Gaussian oscillator ground states."""
__version__ = "0.1.0"
