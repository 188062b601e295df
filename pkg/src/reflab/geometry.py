"""Two-planes through pairs of roots: keys, angular order, cone membership."""

from __future__ import annotations

from functools import cmp_to_key
from math import gcd
from fractions import Fraction
from typing import Sequence

from .scalars import EPS, Mode, Scalar, canon, is_zero, sign


def plucker(u: Sequence[Scalar], v: Sequence[Scalar]) -> tuple:
    n = len(u)
    return tuple(u[i] * v[j] - u[j] * v[i] for i in range(n) for j in range(i + 1, n))


def plane_key(u: Sequence[Scalar], v: Sequence[Scalar], mode: Mode):
    """Canonical key of span{u, v}; ``None`` when u and v are proportional."""
    p = plucker(u, v)
    if mode is Mode.APPROX:
        scale = max(p, key=abs)
        if abs(scale) <= EPS:
            return None
        first = next(x for x in p if abs(x) > EPS * abs(scale) * 1e3)
        s = abs(scale) if first > 0 else -abs(scale)
        return tuple(round(x / s, 9) + 0.0 for x in p)
    if not any(p):
        return None
    if any(type(x) is Fraction for x in p):
        den = 1
        for x in p:
            if type(x) is Fraction:
                den = den * x.denominator // gcd(den, x.denominator)
        p = tuple(int(x * den) for x in p)
    g = 0
    for x in p:
        g = gcd(g, x)
    first = next(x for x in p if x)
    if first < 0:
        g = -g
    return tuple(x // g for x in p)


def projection_axes(key: tuple, n: int) -> tuple:
    """A coordinate pair (i, j) on which the plane projects injectively."""
    best = None
    k = 0
    for i in range(n):
        for j in range(i + 1, n):
            if best is None or abs(key[k]) > abs(best[0]):
                best = (key[k], i, j)
            k += 1
    return best[1], best[2]


def orient(x: Sequence[Scalar], y: Sequence[Scalar], axes: tuple) -> Scalar:
    i, j = axes
    return x[i] * y[j] - x[j] * y[i]


def angular_sort(vectors: dict, axes: tuple, mode: Mode) -> list:
    """Sort ids of coplanar positive vectors by angle inside their pointed cone."""

    def cmp(a, b):
        return -sign(orient(vectors[a], vectors[b], axes), mode)

    ids = sorted(vectors, key=cmp_to_key(cmp))
    return ids


def cone_coefficients(g: Sequence[Scalar], a: Sequence[Scalar], b: Sequence[Scalar], mode: Mode):
    """Solve g = x a + y b; return (x, y) or ``None`` if g is off the plane."""
    n = len(g)
    best = None
    for i in range(n):
        for j in range(i + 1, n):
            det = a[i] * b[j] - a[j] * b[i]
            if best is None or abs(det) > abs(best[0]):
                best = (det, i, j)
    det, i, j = best
    if is_zero(det, mode):
        raise ValueError("a and b are proportional")
    if mode is Mode.EXACT:
        det = Fraction(det)
    x = (g[i] * b[j] - g[j] * b[i]) / det
    y = (a[i] * g[j] - a[j] * g[i]) / det
    for k in range(n):
        if not is_zero(x * a[k] + y * b[k] - g[k], mode):
            return None
    if mode is Mode.EXACT:
        return canon(x), canon(y)
    return x, y


def in_cone(g, a, b, mode: Mode) -> bool:
    """g is a nonnegative combination of a and b (and lies on their plane)."""
    xy = cone_coefficients(g, a, b, mode)
    return xy is not None and sign(xy[0], mode) >= 0 and sign(xy[1], mode) >= 0


class PlaneIndex:
    """Every 2-plane holding at least two slice roots, with its roots in angular order.

    Built from all pairs, so it costs O(N^2) once per slice.
    """

    def __init__(self, slice_):
        mode = slice_.mode
        n = slice_.rank
        coeffs = [r.coeffs for r in slice_.roots]
        members: dict = {}
        for a in range(len(coeffs)):
            ca = coeffs[a]
            for b in range(a + 1, len(coeffs)):
                k = plane_key(ca, coeffs[b], mode)
                if k is None:
                    continue
                s = members.get(k)
                if s is None:
                    members[k] = {a, b}
                else:
                    s.add(a)
                    s.add(b)
        self.planes: dict = {}
        for k, ids in members.items():
            axes = projection_axes(k, n)
            self.planes[k] = tuple(angular_sort({i: coeffs[i] for i in sorted(ids)}, axes, mode))

    def __len__(self) -> int:
        return len(self.planes)

    def items(self):
        return self.planes.items()

    def rich(self, minimum: int = 3):
        """Planes with at least ``minimum`` roots."""
        return {k: v for k, v in self.planes.items() if len(v) >= minimum}
