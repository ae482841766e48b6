"""
Arithmetic and linear algebra over F_p.
"""

from c2lab.fp.linalg import (
    FpElement,
    FpMatrix,
    batched_det_mod_p,
    check_prime,
    det,
    is_prime,
    iterate_until_periodic,
    mat_vec,
    minimal_eventual_period,
)

__all__ = [
    "FpElement",
    "FpMatrix",
    "batched_det_mod_p",
    "check_prime",
    "det",
    "is_prime",
    "iterate_until_periodic",
    "mat_vec",
    "minimal_eventual_period",
]
