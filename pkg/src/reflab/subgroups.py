"""Dihedral reflection subgroups seen inside a root slice."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .core import RootSlice, bform, reflect_in_root
from .errors import ClosureEscapesSlice, RankUnsupported
from .geometry import angular_sort, in_cone, plane_key, projection_axes
from .scalars import EPS, Mode, Scalar, canon, is_negative_vector

DEFAULT_M_BOUND = 1000


@dataclass(frozen=True)
class Classification:
    kind: str  # "finite" or "infinite"
    order: Optional[int] = None

    @property
    def infinite(self) -> bool:
        return self.kind == "infinite"

    def __str__(self) -> str:
        return "Infinite" if self.infinite else f"Finite({self.order})"


INFINITE = Classification("infinite")


def classify(b: Scalar, mode: Mode, m_bound: int = DEFAULT_M_BOUND) -> Optional[Classification]:
    """Classify a canonical pair from B(g1, g2); ``None`` if b is not a canonical value."""
    if mode is Mode.EXACT:
        if b <= -1:
            return INFINITE
        if b == 0:
            return Classification("finite", 2)
        if b == Fraction(-1, 2):
            return Classification("finite", 3)
        return None
    if b <= -1 + EPS:
        return INFINITE
    for m in range(2, m_bound + 1):
        if abs(b + math.cos(math.pi / m)) < EPS:
            return Classification("finite", m)
    return None


@dataclass(frozen=True)
class DihedralSubgroup:
    canonical_pair: tuple  # root ids (g1, g2)
    canonical_coeffs: tuple  # their coefficient vectors
    bform: Scalar
    classification: Classification
    positive_roots_in_slice: tuple  # ids, angular order from g1 to g2

    @property
    def plane(self):
        return self.plane_key(Mode.EXACT if not isinstance(self.bform, float) else Mode.APPROX)

    def plane_key(self, mode: Mode):
        return plane_key(self.canonical_coeffs[0], self.canonical_coeffs[1], mode)

    def members(self, slice_: RootSlice) -> list:
        """Ids of ``slice_`` roots in cone(g1, g2), in angular order from g1."""
        g1, g2 = self.canonical_coeffs
        mode = slice_.mode
        found = {r.id: r.coeffs for r in slice_ if in_cone(r.coeffs, g1, g2, mode)}
        return _oriented(found, g1, g2, mode)


def _oriented(vectors: dict, g1, g2, mode: Mode) -> list:
    key = plane_key(g1, g2, mode)
    ids = angular_sort(vectors, projection_axes(key, len(g1)), mode)
    if ids and vectors[ids[0]] != g1 and vectors[ids[-1]] == g1:
        ids.reverse()
    return ids


def _from_plane_roots(ids: list, slice_: RootSlice, m_bound: int) -> DihedralSubgroup:
    """Canonical pair = angular extremes of coplanar roots, checked by the form."""
    mode = slice_.mode
    vecs = {i: slice_.coeffs(i) for i in ids}
    key = plane_key(vecs[ids[0]], vecs[ids[1]], mode)
    order = angular_sort(vecs, projection_axes(key, slice_.rank), mode)
    g1, g2 = order[0], order[-1]
    if g2 < g1:
        g1, g2 = g2, g1
        order.reverse()
    b = bform(vecs[g1], vecs[g2], slice_.gram)
    cls = classify(b, mode, m_bound)
    if cls is None:
        raise ClosureEscapesSlice(
            f"extreme roots {g1}, {g2} have B = {b}, not a canonical value; deepen the slice"
        )
    return DihedralSubgroup((g1, g2), (vecs[g1], vecs[g2]), b, cls, tuple(order))


def _positive(v, mode: Mode) -> tuple:
    if is_negative_vector(v, mode):
        return tuple(canon(-x) if mode is Mode.EXACT else -x for x in v)
    return v


def dihedral_closure(a: int, b: int, slice_: RootSlice, m_bound: int = DEFAULT_M_BOUND) -> DihedralSubgroup:
    """Subgroup generated by the reflections of roots a and b, as seen in the slice.

    Roots are collected by reflecting collected roots in one another (all such
    reflections lie in the subgroup) while results stay inside the slice.
    """
    if a == b:
        raise ValueError("a and b must be distinct roots")
    gram, mode = slice_.gram, slice_.mode
    collected = {a: slice_.coeffs(a), b: slice_.coeffs(b)}
    pending = [a, b]
    while pending:
        x = pending.pop()
        for y in list(collected):
            if y == x:
                continue
            for src, mirror in ((collected[y], collected[x]), (collected[x], collected[y])):
                w = _positive(reflect_in_root(src, mirror, gram), mode)
                rid = slice_.lookup(w)
                if rid is not None and rid not in collected:
                    collected[rid] = slice_.coeffs(rid)
                    pending.append(rid)
    return _from_plane_roots(sorted(collected), slice_, m_bound)


def plane_roots(a: int, b: int, slice_: RootSlice) -> list:
    """All slice root ids lying on span{a, b}."""
    mode = slice_.mode
    ca, cb = slice_.coeffs(a), slice_.coeffs(b)
    key = plane_key(ca, cb, mode)
    if key is None:
        raise ValueError("roots are proportional")
    cached = slice_.__dict__.get("planes")
    if cached is not None:
        return list(cached.planes[key])
    out = [a]
    for r in slice_:
        if r.id != a and plane_key(ca, r.coeffs, mode) == key:
            out.append(r.id)
    return out


def maximal_dihedral(a: int, b: int, slice_: RootSlice, m_bound: int = DEFAULT_M_BOUND) -> DihedralSubgroup:
    """The maximal dihedral subgroup through a and b: every slice root on their plane."""
    if a == b:
        raise ValueError("a and b must be distinct roots")
    return _from_plane_roots(sorted(plane_roots(a, b, slice_)), slice_, m_bound)


def subgroup_of_plane(ids, slice_: RootSlice, m_bound: int = DEFAULT_M_BOUND) -> DihedralSubgroup:
    return _from_plane_roots(sorted(ids), slice_, m_bound)


def barycentric(v, axis: int, mode: Mode) -> Scalar:
    if mode is Mode.EXACT:
        return canon(Fraction(v[axis]) / sum(v))
    return v[axis] / sum(v)


def fiber(slice_: RootSlice, axis: int, c: Scalar) -> list:
    """Slice roots whose barycentric coordinate along ``axis`` equals c."""
    if slice_.rank != 3:
        raise RankUnsupported("fibers are defined for rank 3")
    mode = slice_.mode
    if mode is Mode.EXACT:
        c = canon(Fraction(c))
        return [r.id for r in slice_ if barycentric(r.coeffs, axis, mode) == c]
    return [r.id for r in slice_ if abs(barycentric(r.coeffs, axis, mode) - c) < EPS]


def fibers(slice_: RootSlice, axis: int = 0) -> dict:
    """Map from each observed barycentric value along ``axis`` to its root ids."""
    if slice_.rank != 3:
        raise RankUnsupported("fibers are defined for rank 3")
    out: dict = {}
    for r in slice_:
        out.setdefault(barycentric(r.coeffs, axis, slice_.mode), []).append(r.id)
    return dict(sorted(out.items()))
