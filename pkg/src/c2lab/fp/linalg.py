"""
Exact linear algebra over the prime field F_p.

Scalars and small dense matrices are plain Python integers reduced mod p.
``batched_det_mod_p`` is the numpy kernel used by point counting; it stays in
int64 because every intermediate product is below p^2 < 2^62.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import sympy

from c2lab.exceptions import DimensionMismatchError, NotPrimeError

MAX_PRIME = 2**31


def is_prime(p: int) -> bool:
    return 2 <= p <= MAX_PRIME and bool(sympy.isprime(p))


@lru_cache(maxsize=64)
def check_prime(p: int) -> int:
    """Validate ``p`` once; returns it unchanged."""
    if not is_prime(p):
        raise NotPrimeError(p)
    return p


@dataclass(frozen=True)
class FpElement:
    """Residue class modulo a prime."""

    residue: int
    modulus: int

    def __post_init__(self) -> None:
        check_prime(self.modulus)
        object.__setattr__(self, "residue", self.residue % self.modulus)

    def _coerce(self, other: FpElement | int) -> int:
        if isinstance(other, FpElement):
            if other.modulus != self.modulus:
                raise DimensionMismatchError(
                    detail=f"Mixing F_{self.modulus} and F_{other.modulus}"
                )
            return other.residue
        return other

    def __add__(self, other: FpElement | int) -> FpElement:
        return FpElement(self.residue + self._coerce(other), self.modulus)

    def __sub__(self, other: FpElement | int) -> FpElement:
        return FpElement(self.residue - self._coerce(other), self.modulus)

    def __mul__(self, other: FpElement | int) -> FpElement:
        return FpElement(self.residue * self._coerce(other), self.modulus)

    def __neg__(self) -> FpElement:
        return FpElement(-self.residue, self.modulus)

    def inverse(self) -> FpElement:
        if self.residue == 0:
            raise ZeroDivisionError("0 has no inverse")
        return FpElement(pow(self.residue, -1, self.modulus), self.modulus)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, FpElement):
            return self.residue == other.residue and self.modulus == other.modulus
        if isinstance(other, int):
            return self.residue == other % self.modulus
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.residue, self.modulus))

    def __int__(self) -> int:
        return self.residue

    def __repr__(self) -> str:
        return f"{self.residue} (mod {self.modulus})"


@dataclass(frozen=True)
class FpMatrix:
    """Dense row-major matrix over F_p."""

    rows: int
    cols: int
    entries: tuple[tuple[int, ...], ...]
    modulus: int

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], p: int) -> FpMatrix:
        check_prime(p)
        data = tuple(tuple(int(x) % p for x in row) for row in rows)
        widths = {len(row) for row in data}
        if len(widths) > 1:
            raise DimensionMismatchError(detail=f"Ragged rows with widths {sorted(widths)}")
        cols = widths.pop() if widths else 0
        return cls(len(data), cols, data, p)

    @classmethod
    def identity(cls, n: int, p: int) -> FpMatrix:
        return cls.from_rows([[int(i == j) for j in range(n)] for i in range(n)], p)

    @classmethod
    def zeros(cls, rows: int, cols: int, p: int) -> FpMatrix:
        return cls.from_rows([[0] * cols for _ in range(rows)], p)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], size: int, p: int) -> FpMatrix:
        return cls.from_rows([[col[i] for col in columns] for i in range(size)], p)

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def to_numpy(self) -> np.ndarray:
        return np.array(self.entries, dtype=np.int64).reshape(self.rows, self.cols)

    def transpose(self) -> FpMatrix:
        return FpMatrix.from_rows(
            [[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)],
            self.modulus,
        )

    def __matmul__(self, other: FpMatrix) -> FpMatrix:
        if self.cols != other.rows or self.modulus != other.modulus:
            raise DimensionMismatchError(
                detail=f"Cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}"
            )
        p = self.modulus
        product = [
            [
                sum(self.entries[i][k] * other.entries[k][j] for k in range(self.cols)) % p
                for j in range(other.cols)
            ]
            for i in range(self.rows)
        ]
        return FpMatrix.from_rows(product, p)


def det(m: FpMatrix) -> FpElement:
    """Determinant by pivoted Gaussian elimination mod p."""
    if not m.is_square:
        raise DimensionMismatchError(detail=f"det of non-square {m.rows}x{m.cols} matrix")
    p = m.modulus
    a = [list(row) for row in m.entries]
    n = m.rows
    result = 1
    for c in range(n):
        pivot = next((r for r in range(c, n) if a[r][c]), None)
        if pivot is None:
            return FpElement(0, p)
        if pivot != c:
            a[c], a[pivot] = a[pivot], a[c]
            result = -result
        result = result * a[c][c] % p
        inv = pow(a[c][c], -1, p)
        for r in range(c + 1, n):
            if a[r][c]:
                f = a[r][c] * inv % p
                a[r] = [(x - f * y) % p for x, y in zip(a[r], a[c], strict=True)]
    return FpElement(result, p)


def mat_vec(m: FpMatrix, v: Sequence[int]) -> tuple[int, ...]:
    if len(v) != m.cols:
        raise DimensionMismatchError(
            detail=f"Matrix has {m.cols} columns, vector has length {len(v)}"
        )
    p = m.modulus
    return tuple(sum(x * y for x, y in zip(row, v, strict=True)) % p for row in m.entries)


def iterate_until_periodic(
    m: FpMatrix, v0: Sequence[int]
) -> tuple[list[tuple[int, ...]], list[tuple[int, ...]]]:
    """
    Split the orbit ``v0, m v0, m^2 v0, ...`` into preperiod and period.

    Returns ``(preperiod, period)`` with both as short as possible; the orbit is
    the preperiod followed by the period repeated forever.
    """
    if not m.is_square:
        raise DimensionMismatchError(detail="Iteration needs a square matrix")
    current = tuple(int(x) % m.modulus for x in v0)
    if len(current) != m.cols:
        raise DimensionMismatchError(
            detail=f"Matrix has {m.cols} columns, vector has length {len(current)}"
        )
    seen: dict[tuple[int, ...], int] = {}
    orbit: list[tuple[int, ...]] = []
    while current not in seen:
        seen[current] = len(orbit)
        orbit.append(current)
        current = mat_vec(m, current)
    start = seen[current]
    return orbit[:start], orbit[start:]


def minimal_eventual_period(values: Sequence[int], start: int, period: int) -> tuple[int, int]:
    """
    Shrink a known eventual period of a scalar sequence.

    ``values[start:]`` must be periodic with period ``period`` and contain at
    least ``start + 2 * period`` entries. Returns the minimal ``(start, period)``.
    """
    if len(values) < start + 2 * period:
        raise DimensionMismatchError(
            detail=f"Need {start + 2 * period} values, got {len(values)}"
        )
    best = period
    for d in sorted(_divisors(period)):
        if all(values[start + i] == values[start + i + d] for i in range(period)):
            best = d
            break
    first = start
    while first > 0 and values[first - 1] == values[first - 1 + best]:
        first -= 1
    return first, best


def _divisors(n: int) -> Iterable[int]:
    return (d for d in range(1, n + 1) if n % d == 0)


# -----------------------------------------------------------------------------
# Batched kernels
# -----------------------------------------------------------------------------


@lru_cache(maxsize=16)
def _inverse_table(p: int) -> np.ndarray:
    table = np.zeros(p, dtype=np.int64)
    for x in range(1, p):
        table[x] = pow(x, -1, p)
    return table


def _inverse_mod_p(values: np.ndarray, p: int) -> np.ndarray:
    if p <= 1 << 16:
        return _inverse_table(p)[values]
    # Fermat: x^(p-2) by square-and-multiply on int64
    result = np.ones_like(values)
    base = values.copy()
    exponent = p - 2
    while exponent:
        if exponent & 1:
            result = result * base % p
        base = base * base % p
        exponent >>= 1
    return result


def batched_det_mod_p(stack: np.ndarray, p: int) -> np.ndarray:
    """
    Determinants of a stack of square matrices modulo p.

    ``stack`` has shape ``(B, n, n)`` with entries in ``[0, p)``; it is copied,
    not modified. Returns an int64 array of shape ``(B,)``.
    """
    if stack.ndim != 3 or stack.shape[1] != stack.shape[2]:
        raise DimensionMismatchError(detail=f"Expected (B, n, n), got {stack.shape}")
    a = np.array(stack, dtype=np.int64, copy=True) % p
    batch, n, _ = a.shape
    result = np.ones(batch, dtype=np.int64)
    alive = np.ones(batch, dtype=bool)
    rows = np.arange(batch)
    for c in range(n):
        column = a[:, c:, c]
        has_pivot = column.any(axis=1)
        alive &= has_pivot
        pivot = c + np.argmax(column != 0, axis=1)
        swap = pivot != c
        if swap.any():
            idx = rows[swap]
            top = a[idx, c, :].copy()
            a[idx, c, :] = a[idx, pivot[swap], :]
            a[idx, pivot[swap], :] = top
            result[swap] = (p - result[swap]) % p
        pivots = a[:, c, c]
        result = result * pivots % p
        if c + 1 == n:
            break
        inv = _inverse_mod_p(np.where(pivots == 0, 1, pivots), p)
        factors = a[:, c + 1 :, c] * inv[:, None] % p
        a[:, c + 1 :, c:] = (a[:, c + 1 :, c:] - factors[:, :, None] * a[:, None, c, c:]) % p
    result[~alive] = 0
    return result
