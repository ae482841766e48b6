"""
Tests for arithmetic and linear algebra over F_p.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from c2lab.exceptions import DimensionMismatchError, NotPrimeError
from c2lab.fp import (
    FpElement,
    FpMatrix,
    batched_det_mod_p,
    check_prime,
    det,
    iterate_until_periodic,
    mat_vec,
    minimal_eventual_period,
)


class TestFpElement:
    """Test residue arithmetic."""

    def test_reduction(self):
        """Test residues are reduced on construction."""
        assert FpElement(-1, 5).residue == 4
        assert FpElement(7, 5) == 2

    def test_inverse(self):
        """Test the multiplicative inverse."""
        assert FpElement(3, 7).inverse() * 3 == 1

    def test_zero_inverse(self):
        """Test zero has no inverse."""
        with pytest.raises(ZeroDivisionError):
            FpElement(0, 7).inverse()

    def test_mixed_moduli(self):
        """Test mixing fields is rejected."""
        with pytest.raises(DimensionMismatchError):
            FpElement(1, 3) + FpElement(1, 5)

    def test_non_prime(self):
        """Test composite moduli are rejected."""
        with pytest.raises(NotPrimeError):
            check_prime(9)
        with pytest.raises(NotPrimeError):
            FpElement(1, 1)


class TestDeterminant:
    """Test determinants mod p."""

    def test_two_by_two(self):
        """Test a 2x2 determinant."""
        assert det(FpMatrix.from_rows([[1, 2], [3, 4]], 5)) == 3

    def test_singular(self):
        """Test a singular matrix."""
        assert det(FpMatrix.from_rows([[1, 2], [2, 4]], 7)) == 0

    def test_pivot_swap(self):
        """Test a row swap flips the sign."""
        assert det(FpMatrix.from_rows([[0, 1], [1, 0]], 7)) == 6

    def test_non_square(self):
        """Test non-square input is rejected."""
        with pytest.raises(DimensionMismatchError):
            det(FpMatrix.from_rows([[1, 2, 3]], 5))

    def test_ragged(self):
        """Test ragged rows are rejected."""
        with pytest.raises(DimensionMismatchError):
            FpMatrix.from_rows([[1, 2], [3]], 5)

    @given(
        st.sampled_from([2, 3, 5, 7, 101]),
        st.integers(min_value=1, max_value=4),
        st.data(),
    )
    @settings(max_examples=60, deadline=None)
    def test_batched_matches_scalar(self, p, n, data):
        """Test the batched kernel against scalar elimination."""
        entries = st.integers(min_value=0, max_value=p - 1)
        stack = [
            data.draw(st.lists(st.lists(entries, min_size=n, max_size=n), min_size=n, max_size=n))
            for _ in range(3)
        ]
        got = batched_det_mod_p(np.array(stack, dtype=np.int64), p)

        assert got.tolist() == [int(det(FpMatrix.from_rows(m, p))) for m in stack]

    def test_batched_input_untouched(self):
        """Test the batched kernel copies its input."""
        stack = np.array([[[0, 1], [1, 0]]], dtype=np.int64)
        batched_det_mod_p(stack, 3)

        assert stack.tolist() == [[[0, 1], [1, 0]]]


class TestIteration:
    """Test matrix orbits and periods."""

    def test_mat_vec(self):
        """Test a matrix-vector product."""
        m = FpMatrix.from_rows([[1, 1], [1, 0]], 5)

        assert mat_vec(m, [2, 3]) == (0, 2)

    def test_fibonacci_mod_2(self):
        """Test the Fibonacci matrix orbit is purely periodic."""
        m = FpMatrix.from_rows([[1, 1], [1, 0]], 2)
        pre, period = iterate_until_periodic(m, (1, 0))

        assert pre == []
        assert period == [(1, 0), (1, 1), (0, 1)]

    def test_nilpotent(self):
        """Test a nilpotent orbit ends in zero."""
        m = FpMatrix.from_rows([[0, 1], [0, 0]], 3)
        pre, period = iterate_until_periodic(m, (0, 1))

        assert pre == [(0, 1), (1, 0)]
        assert period == [(0, 0)]

    def test_minimal_eventual_period(self):
        """Test shrinking both the period and the preperiod."""
        assert minimal_eventual_period([5, 1, 0, 1, 0, 1, 0], 3, 2) == (1, 2)

    def test_constant_tail(self):
        """Test a constant sequence has period one from the start."""
        assert minimal_eventual_period([4, 4, 4, 4, 4, 4], 2, 2) == (0, 1)

    def test_too_short(self):
        """Test too few values are rejected."""
        with pytest.raises(DimensionMismatchError):
            minimal_eventual_period([1, 2, 1], 0, 2)
