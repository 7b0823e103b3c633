"""Exact integer / rational arithmetic backbone.

Everything downstream (simplex, branch-and-bound, cone reductions) runs on
arbitrary-precision integers and `fractions.Fraction`; no floats are used for
any decision, so coefficient growth is a size issue, never a correctness one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

IntVector = tuple[int, ...]
RatVector = tuple[Fraction, ...]


class SingularMatrixError(ValueError):
    """Square system with zero determinant passed to a solver that needs one."""


@dataclass(frozen=True)
class IntMatrix:
    """Immutable integer matrix, row-major storage."""

    nrows: int
    ncols: int
    entries: IntVector

    def __post_init__(self) -> None:
        if self.nrows < 0 or self.ncols < 0:
            raise ValueError("matrix dimensions must be nonnegative")
        if len(self.entries) != self.nrows * self.ncols:
            raise ValueError(
                f"expected {self.nrows * self.ncols} entries, got {len(self.entries)}"
            )

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "IntMatrix":
        nrows = len(rows)
        ncols = len(rows[0]) if nrows else 0
        flat: list[int] = []
        for r in rows:
            if len(r) != ncols:
                raise ValueError("ragged rows")
            flat.extend(int(v) for v in r)
        return cls(nrows, ncols, tuple(flat))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(1 if i == j else 0 for i in range(n) for j in range(n)))

    def entry(self, i: int, j: int) -> int:
        return self.entries[i * self.ncols + j]

    def row(self, i: int) -> IntVector:
        base = i * self.ncols
        return self.entries[base : base + self.ncols]

    def col(self, j: int) -> IntVector:
        return tuple(self.entries[i * self.ncols + j] for i in range(self.nrows))

    def iter_rows(self) -> Iterator[IntVector]:
        for i in range(self.nrows):
            yield self.row(i)

    def transpose(self) -> "IntMatrix":
        return IntMatrix(
            self.ncols,
            self.nrows,
            tuple(self.entry(i, j) for j in range(self.ncols) for i in range(self.nrows)),
        )

    def inf_norm(self) -> int:
        """Largest absolute entry (0 for an empty matrix)."""
        return max((abs(v) for v in self.entries), default=0)

    def replace_col(self, j: int, column: Sequence[int]) -> "IntMatrix":
        if len(column) != self.nrows:
            raise ValueError("column length mismatch")
        flat = list(self.entries)
        for i, v in enumerate(column):
            flat[i * self.ncols + j] = int(v)
        return IntMatrix(self.nrows, self.ncols, tuple(flat))

    def mat_vec(self, x: Sequence[int]) -> IntVector:
        if len(x) != self.ncols:
            raise ValueError("vector length mismatch")
        return tuple(
            sum(self.entry(i, j) * x[j] for j in range(self.ncols)) for i in range(self.nrows)
        )


def dot(u: Sequence[int], v: Sequence[int]) -> int:
    if len(u) != len(v):
        raise ValueError("length mismatch")
    return sum(a * b for a, b in zip(u, v))


def l1_norm(v: Iterable[int]) -> int:
    return sum(abs(x) for x in v)


def det_cofactor(m: IntMatrix) -> int:
    """Cofactor-expansion determinant; exponential, used as the small-dim oracle."""
    if m.nrows != m.ncols:
        raise ValueError("determinant of a non-square matrix")
    n = m.nrows
    if n == 0:
        return 1
    rows = [list(m.row(i)) for i in range(n)]

    def rec(rs: list[list[int]], cols: list[int]) -> int:
        if len(cols) == 1:
            return rs[0][cols[0]]
        total = 0
        sign = 1
        rest = rs[1:]
        for k, c in enumerate(cols):
            pivot = rs[0][c]
            if pivot:
                sub_cols = cols[:k] + cols[k + 1 :]
                total += sign * pivot * rec(rest, sub_cols)
            sign = -sign
        return total

    return rec(rows, list(range(n)))


def det(m: IntMatrix) -> int:
    """Exact determinant via fraction-free (Bareiss) elimination."""
    if m.nrows != m.ncols:
        raise ValueError("determinant of a non-square matrix")
    n = m.nrows
    if n == 0:
        return 1
    if n == 1:
        return m.entries[0]
    if n == 2:
        a, b, c, d = m.entries
        return a * d - b * c
    rows = [list(m.row(i)) for i in range(n)]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if rows[k][k] == 0:
            # pivot search keeps the elimination fraction-free
            for r in range(k + 1, n):
                if rows[r][k] != 0:
                    rows[k], rows[r] = rows[r], rows[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = rows[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                rows[i][j] = (pivot * rows[i][j] - rows[i][k] * rows[k][j]) // prev
            rows[i][k] = 0
        prev = pivot
    return sign * rows[n - 1][n - 1]


def cramer_solve(m: IntMatrix, rhs: Sequence[int]) -> tuple[RatVector, IntVector, int]:
    """Solve m @ x = rhs exactly.

    Returns (rational solution, |det|-scaled integer solution, scale), where
    scale = |det(m)| and scaled[i] = scale * x[i] is always integral.
    """
    if m.nrows != m.ncols:
        raise ValueError("cramer_solve needs a square matrix")
    if len(rhs) != m.nrows:
        raise ValueError("rhs length mismatch")
    d = det(m)
    if d == 0:
        raise SingularMatrixError("matrix is singular")
    scale = abs(d)
    sign = 1 if d > 0 else -1
    rat: list[Fraction] = []
    scaled: list[int] = []
    for j in range(m.ncols):
        dj = det(m.replace_col(j, rhs))
        rat.append(Fraction(dj, d))
        scaled.append(sign * dj)
    return tuple(rat), tuple(scaled), scale


def isqrt_ceil(n: int) -> int:
    """Smallest integer s with s*s >= n (n >= 0)."""
    if n < 0:
        raise ValueError("isqrt_ceil of a negative number")
    s = math.isqrt(n)
    return s if s * s == n else s + 1


def hadamard_l1_bound(n_dim: int, a_inf: int) -> int:
    """Smallest integer >= n * (sqrt(n) * a)**(n-1), evaluated exactly.

    This is the Hadamard-style cap on the l1-norm of scaled Cramer solutions
    B^{-1} e_j * |det B| for n x n integer matrices with entries bounded by a.
    Computed as ceil(sqrt(n**(n+1) * a**(2(n-1)))) -- no floating point.
    """
    if n_dim < 1:
        raise ValueError("dimension must be >= 1")
    if a_inf < 0:
        raise ValueError("norm bound must be nonnegative")
    if n_dim == 1:
        return 1  # n * (sqrt(n)*a)^0
    return isqrt_ceil(n_dim ** (n_dim + 1) * a_inf ** (2 * (n_dim - 1)))


def bit_size(value: object) -> int:
    """Total encoding size in bits: 1 + ceil(log2(|v|+1)) per integer scalar.

    Accepts a bare int, an IntMatrix, arbitrarily nested tuples/lists of these,
    or any object exposing ``bit_scalars()`` (an iterable of its integer fields).
    """
    if isinstance(value, bool):
        raise TypeError("bit_size of a bool is almost certainly a bug")
    if isinstance(value, int):
        return 1 + abs(value).bit_length()
    if isinstance(value, IntMatrix):
        return sum(1 + abs(v).bit_length() for v in value.entries)
    if isinstance(value, (tuple, list)):
        return sum(bit_size(v) for v in value)
    scalars = getattr(value, "bit_scalars", None)
    if scalars is not None:
        return sum(bit_size(v) for v in scalars())
    raise TypeError(f"bit_size does not understand {type(value).__name__}")


def ceil_frac(q: Fraction) -> int:
    return -((-q.numerator) // q.denominator)


def floor_frac(q: Fraction) -> int:
    return q.numerator // q.denominator


def vec_gcd(v: Iterable[int]) -> int:
    g = 0
    for x in v:
        g = math.gcd(g, x)
    return g


def primitive_direction(v: Sequence[int]) -> IntVector:
    """Scale an integer vector down by the gcd of its entries (0 stays 0)."""
    g = vec_gcd(v)
    if g == 0:
        return tuple(v)
    return tuple(x // g for x in v)
