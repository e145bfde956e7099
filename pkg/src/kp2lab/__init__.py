"""Numerical lab for the KP-II equation on a periodic box.

Spectral primitives, path spaces of U^p/V^p type, randomized estimate
experiments and a Picard solver for small data.
"""

__version__ = "0.1.0"
