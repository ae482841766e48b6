"""
c2lab: exact c2 invariants of Feynman graphs over prime fields.

Computes c2 by point counting, by the Dodgson-product formulas and by
edge-assignment counting on spanning forest polynomials, and solves
recursively constructible graph families with a transfer matrix.
"""

from c2lab.logging_setup import ensure_logging

__version__ = "0.3.0"

ensure_logging()
