"""Normalized roots on the standard affine hyperplane and the isotropic cone."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .core import GramMatrix, RootSlice, bform
from .errors import DegenerateQuadratic
from .scalars import Mode, Scalar, canon, sign


@dataclass(frozen=True)
class NormalizedRoot:
    coords: tuple
    source: int


@dataclass(frozen=True)
class ConeReport:
    qvalue_endpoints: tuple
    intersects: bool
    t_roots: tuple
    exact_roots: bool = True


Point = Union[NormalizedRoot, Sequence[Scalar]]


def normalized_coords(v: Sequence[Scalar], mode: Mode) -> tuple:
    h = sum(v)
    if mode is Mode.EXACT:
        return tuple(canon(Fraction(x) / h) for x in v)
    return tuple(x / h for x in v)


def normalize(rid: int, slice_: RootSlice) -> NormalizedRoot:
    return NormalizedRoot(normalized_coords(slice_.coeffs(rid), slice_.mode), rid)


def first_coordinate(rid: int, slice_: RootSlice, axis: int = 0) -> Scalar:
    """Barycentric coordinate of a root along one simple-root axis."""
    v = slice_.coeffs(rid)
    if slice_.mode is Mode.EXACT:
        return canon(Fraction(v[axis]) / sum(v))
    return v[axis] / sum(v)


def qform(p: Point, gram: GramMatrix) -> Scalar:
    """B(p, p) for a point on the standard hyperplane."""
    p = _coords(p)
    return bform(p, p, gram)


def _coords(p: Point) -> tuple:
    return p.coords if isinstance(p, NormalizedRoot) else tuple(p)


def _cmp_root(b, disc, s: int, a, y, mode: Mode) -> int:
    """Sign of ((-b + s*sqrt(disc)) / (2a)) - y, decided without square roots."""
    # compare s*sqrt(disc) with z = 2a*y + b, then account for the sign of 2a
    z = 2 * a * y + b
    if s > 0:
        c = 1 if z < 0 else sign(disc - z * z, mode)
    else:
        if z > 0 or (z == 0 and disc != 0):
            c = -1
        elif z == 0:
            c = 0
        else:
            c = -sign(disc - z * z, mode)
    return c if a > 0 else -c


def _exact_sqrt(x: Fraction):
    if x < 0:
        return None
    x = Fraction(x)
    n, d = x.numerator, x.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def segment_meets_cone(
    p: Point, q: Point, gram: GramMatrix, *, half_open: bool = False
) -> ConeReport:
    """Where the segment (1-t)p + tq, t in [0, 1], meets {B(x, x) = 0}.

    Tangency counts as meeting. With ``half_open`` the endpoint t = 1 is
    excluded. Exact mode decides membership of irrational roots from signs.
    """
    p, q = _coords(p), _coords(q)
    mode = gram.mode
    qp, qq, bpq = bform(p, p, gram), bform(q, q, gram), bform(p, q, gram)
    c = qp
    a = qp - 2 * bpq + qq
    b = 2 * (bpq - qp)
    if mode is Mode.EXACT:
        a, b, c = Fraction(a), Fraction(b), Fraction(c)
    if sign(a, mode) == 0 and sign(b, mode) == 0 and sign(c, mode) == 0:
        raise DegenerateQuadratic("the whole segment is isotropic")

    def inside(t) -> bool:
        return 0 <= t and (t < 1 if half_open else t <= 1)

    roots: list = []
    exact = True
    if sign(a, mode) == 0:
        if sign(b, mode) != 0:
            roots = [-c / b]
    else:
        disc = b * b - 4 * a * c
        ds = sign(disc, mode)
        if ds == 0:
            roots = [-b / (2 * a)]
        elif ds > 0:
            r = _exact_sqrt(disc) if mode is Mode.EXACT else None
            if r is not None:
                roots = [(-b - r) / (2 * a), (-b + r) / (2 * a)]
            elif mode is Mode.EXACT:
                exact = False
                hi_cmp = 1 if not half_open else 0
                for s in (-1, 1):
                    lo_ok = _cmp_root(b, disc, s, a, 0, mode) >= 0
                    hi = _cmp_root(b, disc, s, a, 1, mode)
                    hi_ok = hi < 0 or (hi == 0 and hi_cmp == 1)
                    if lo_ok and hi_ok:
                        roots.append((-float(b) + s * math.sqrt(float(disc))) / (2 * float(a)))
            else:
                sq = math.sqrt(disc)
                roots = [(-b - sq) / (2 * a), (-b + sq) / (2 * a)]
    if exact:
        if mode is Mode.APPROX:
            roots = [min(max(t, 0.0), 1.0) if -1e-9 < t < 1 + 1e-9 else t for t in roots]
        roots = [t for t in roots if inside(t)]
        roots = [canon(t) if mode is Mode.EXACT else t for t in roots]
    roots = sorted(set(roots))
    return ConeReport((canon(qp) if mode is Mode.EXACT else qp,
                       canon(qq) if mode is Mode.EXACT else qq),
                      bool(roots), tuple(roots), exact)
