"""qcemu: state-vector emulator for ideal and NMR-like spin quantum computers."""

__version__ = "0.1.0"
