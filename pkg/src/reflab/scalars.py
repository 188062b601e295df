"""Scalar modes: exact rationals or doubles with a global tolerance.

Exact values are ``int`` or ``Fraction``; integral fractions are collapsed to
``int`` so that the universal and simply-laced cases run on machine integers.
"""

from __future__ import annotations

from enum import Enum
from fractions import Fraction
from typing import Sequence, Union

Scalar = Union[int, Fraction, float]
Vector = tuple  # tuple[Scalar, ...]

EPS = 1e-9
KEY_DIGITS = 12


class Mode(str, Enum):
    EXACT = "exact"
    APPROX = "approx"


def canon(x: Scalar) -> Scalar:
    if type(x) is Fraction and x.denominator == 1:
        return x.numerator
    return x


def to_exact(x) -> Scalar:
    """Parse ints, Fractions and strings like ``"-3/2"`` into an exact value."""
    if isinstance(x, bool):
        raise TypeError("bool is not a scalar")
    if isinstance(x, float):
        f = Fraction(x).limit_denominator(10**12)
        if float(f) != x:
            raise ValueError(f"{x!r} has no short exact representation")
        return canon(f)
    return canon(Fraction(x))


def sign(x: Scalar, mode: Mode) -> int:
    if mode is Mode.APPROX:
        if x > EPS:
            return 1
        if x < -EPS:
            return -1
        return 0
    return (x > 0) - (x < 0)


def is_zero(x: Scalar, mode: Mode) -> bool:
    return sign(x, mode) == 0


def eq(x: Scalar, y: Scalar, mode: Mode) -> bool:
    return sign(x - y, mode) == 0


def key_of(v: Sequence[Scalar], mode: Mode) -> tuple:
    """Hashable dedup key for a coefficient vector."""
    if mode is Mode.EXACT:
        return tuple(v)
    return tuple(round(x, KEY_DIGITS) + 0.0 for x in v)


def is_positive_vector(v: Sequence[Scalar], mode: Mode) -> bool:
    if mode is Mode.APPROX:
        return all(x >= -EPS for x in v) and any(x > EPS for x in v)
    return all(x >= 0 for x in v) and any(x > 0 for x in v)


def is_negative_vector(v: Sequence[Scalar], mode: Mode) -> bool:
    return is_positive_vector(tuple(-x for x in v), mode)


def fmt(x: Scalar) -> str:
    """Render a scalar for CSV/JSON output (exact values as ``p/q``)."""
    if isinstance(x, float):
        return repr(round(x, KEY_DIGITS) + 0.0)
    return str(x)


def solve(matrix: Sequence[Sequence[Scalar]], rhs: Sequence[Scalar], mode: Mode) -> list:
    """Solve a small square system by Gauss-Jordan elimination.

    Raises ``ZeroDivisionError`` when the matrix is singular.
    """
    n = len(matrix)
    if mode is Mode.EXACT:
        rows = [[Fraction(x) for x in row] + [Fraction(b)] for row, b in zip(matrix, rhs)]
    else:
        rows = [[float(x) for x in row] + [float(b)] for row, b in zip(matrix, rhs)]
    for col in range(n):
        pivot = max(range(col, n), key=lambda r: abs(rows[r][col]))
        if is_zero(rows[pivot][col], mode):
            raise ZeroDivisionError("singular matrix")
        rows[col], rows[pivot] = rows[pivot], rows[col]
        p = rows[col][col]
        rows[col] = [x / p for x in rows[col]]
        for r in range(n):
            if r != col and rows[r][col] != 0:
                f = rows[r][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[col])]
    out = [row[n] for row in rows]
    return [canon(x) for x in out] if mode is Mode.EXACT else out


def determinant(matrix: Sequence[Sequence[Scalar]], mode: Mode) -> Scalar:
    n = len(matrix)
    if mode is Mode.EXACT:
        rows = [[Fraction(x) for x in row] for row in matrix]
    else:
        rows = [[float(x) for x in row] for row in matrix]
    det = Fraction(1) if mode is Mode.EXACT else 1.0
    for col in range(n):
        pivot = max(range(col, n), key=lambda r: abs(rows[r][col]))
        if rows[pivot][col] == 0:
            return 0
        if pivot != col:
            rows[col], rows[pivot] = rows[pivot], rows[col]
            det = -det
        p = rows[col][col]
        det *= p
        for r in range(col + 1, n):
            f = rows[r][col] / p
            if f:
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[col])]
    return canon(det) if mode is Mode.EXACT else det
