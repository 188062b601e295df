"""Reflection orders on root slices: construction, verification, conjugation."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum
from fractions import Fraction
from functools import cached_property
from typing import Callable, Optional, Sequence

from .core import (
    RootSlice,
    Word,
    apply_word,
    generate_slice,
    is_reduced,
    reflect,
    simple_root,
    type_a,
)
from .errors import (
    EqualNormalizedCoordinates,
    InsufficientCandidates,
    NotAnInversionPrefix,
)
from .scalars import EPS, Mode, canon, determinant, is_positive_vector, key_of, solve


class Cmp(IntEnum):
    LESS = -1
    GREATER = 1


class ReflectionOrderSpec:
    """A recipe that totally orders the roots of any compatible slice."""

    def order_ids(self, slice_: RootSlice) -> list:
        raise NotImplementedError

    def root_key(self, mode: Mode) -> Optional[Callable]:
        """Sort key on arbitrary positive roots, when the order is known beyond slices."""
        return None

    def label(self) -> str:
        return type(self).__name__


@dataclass(frozen=True)
class Lexicographic(ReflectionOrderSpec):
    """Compare normalized roots lexicographically in an ordered basis."""

    basis: tuple

    def __post_init__(self):
        basis = tuple(tuple(v) for v in self.basis)
        n = len(basis)
        if any(len(v) != n for v in basis):
            raise ValueError("basis must consist of n vectors of length n")
        object.__setattr__(self, "basis", basis)
        approx = any(isinstance(x, float) for v in basis for x in v)
        det = determinant([[basis[i][k] for i in range(n)] for k in range(n)],
                          Mode.APPROX if approx else Mode.EXACT)
        if abs(det) <= (EPS if approx else 0):
            raise ValueError("lexicographic basis is linearly dependent")

    @classmethod
    def permutation(cls, order: Sequence[int], rank: Optional[int] = None) -> "Lexicographic":
        """Basis alpha_{order[0]}, alpha_{order[1]}, ... (0-based simple indices)."""
        n = rank or len(order)
        if sorted(order) != list(range(n)):
            raise ValueError(f"{order} is not a permutation of 0..{n - 1}")
        return cls(tuple(simple_root(i, n) for i in order))

    def _inverse_rows(self, mode: Mode) -> list:
        n = len(self.basis)
        cols = [[self.basis[i][k] for i in range(n)] for k in range(n)]
        inv_cols = [solve(cols, simple_root(k, n), mode) for k in range(n)]
        return [[inv_cols[k][i] for k in range(n)] for i in range(n)]

    def root_key(self, mode: Mode) -> Callable:
        rows = self._inverse_rows(mode)
        n = len(rows)

        if mode is Mode.EXACT:
            def key(v):
                h = sum(v)
                return tuple(Fraction(sum(rows[i][k] * v[k] for k in range(n))) / h
                             for i in range(n))
        else:
            def key(v):
                h = sum(v)
                return tuple(sum(rows[i][k] * v[k] for k in range(n)) / h for i in range(n))
        return key

    def order_ids(self, slice_: RootSlice) -> list:
        key = self.root_key(slice_.mode)
        keyed = [(key(r.coeffs), r.id) for r in slice_]
        keyed.sort()
        if slice_.mode is Mode.APPROX:
            for (k1, a), (k2, b) in zip(keyed, keyed[1:]):
                if all(abs(x - y) < EPS for x, y in zip(k1, k2)):
                    raise EqualNormalizedCoordinates(f"roots {a} and {b} share a key")
        else:
            for (k1, a), (k2, b) in zip(keyed, keyed[1:]):
                if k1 == k2:
                    raise EqualNormalizedCoordinates(f"roots {a} and {b} share a key")
        return [rid for _, rid in keyed]

    def reversed(self) -> "Lexicographic":
        return Lexicographic(tuple(tuple(-x for x in v) for v in self.basis))

    def label(self) -> str:
        return "lex:" + ";".join(",".join(str(x) for x in v) for v in self.basis)


@dataclass(frozen=True)
class AInfinityBlock(ReflectionOrderSpec):
    """Blocks j = 1, 2, ...: alpha_1+...+alpha_j, alpha_2+...+alpha_j, ..., alpha_j."""

    def root_key(self, mode: Mode) -> Callable:
        def key(v):
            support = [k for k, x in enumerate(v) if x]
            i, j = support[0], support[-1]
            if support != list(range(i, j + 1)) or any(v[k] != 1 for k in support):
                raise ValueError(f"{v} is not a type-A root")
            return (j, i)
        return key

    def order_ids(self, slice_: RootSlice) -> list:
        key = self.root_key(slice_.mode)
        return sorted((r.id for r in slice_), key=lambda rid: key(slice_.coeffs(rid)))

    def label(self) -> str:
        return "ainf"


@dataclass(frozen=True)
class Explicit(ReflectionOrderSpec):
    """A comparator table: the listed slice ids, least first."""

    ids: tuple

    def order_ids(self, slice_: RootSlice) -> list:
        if sorted(self.ids) != list(range(len(slice_))):
            raise ValueError("explicit order must list every slice id exactly once")
        return list(self.ids)

    def label(self) -> str:
        return "explicit"


@dataclass(frozen=True)
class Backward(ReflectionOrderSpec):
    inner: ReflectionOrderSpec

    def order_ids(self, slice_: RootSlice) -> list:
        return list(reversed(self.inner.order_ids(slice_)))

    def root_key(self, mode: Mode):
        if isinstance(self.inner, Lexicographic):
            return self.inner.reversed().root_key(mode)
        return None

    def label(self) -> str:
        return "backward(" + self.inner.label() + ")"


@dataclass(frozen=True, eq=False)
class TruncatedOrder:
    slice: RootSlice
    sorted_ids: tuple
    spec: ReflectionOrderSpec

    @cached_property
    def position(self) -> dict:
        return {rid: k for k, rid in enumerate(self.sorted_ids)}

    def __len__(self) -> int:
        return len(self.sorted_ids)

    def backward(self) -> "TruncatedOrder":
        return TruncatedOrder(self.slice, tuple(reversed(self.sorted_ids)), Backward(self.spec))

    def coeffs(self) -> list:
        return [self.slice.coeffs(r) for r in self.sorted_ids]


def sort_truncation(slice_: RootSlice, spec: ReflectionOrderSpec) -> TruncatedOrder:
    return TruncatedOrder(slice_, tuple(spec.order_ids(slice_)), spec)


def compare_reflex(a: int, b: int, spec: Lexicographic, slice_: RootSlice) -> Cmp:
    key = _cached_key(spec, slice_)
    ka, kb = key(a), key(b)
    if slice_.mode is Mode.APPROX:
        if all(abs(x - y) < EPS for x, y in zip(ka, kb)):
            raise EqualNormalizedCoordinates(f"roots {a} and {b} have equal normalized keys")
    elif ka == kb:
        raise EqualNormalizedCoordinates(f"roots {a} and {b} have equal normalized keys")
    return Cmp.LESS if ka < kb else Cmp.GREATER


_KEY_CACHE: dict = {}


def _cached_key(spec, slice_):
    ident = (id(slice_), spec)
    hit = _KEY_CACHE.get(ident)
    if hit is None or hit[0] is not slice_:
        raw = spec.root_key(slice_.mode)
        memo: dict = {}

        def key(rid):
            k = memo.get(rid)
            if k is None:
                k = memo[rid] = raw(slice_.coeffs(rid))
            return k

        if len(_KEY_CACHE) > 64:
            _KEY_CACHE.clear()
        _KEY_CACHE[ident] = hit = (slice_, key)
    return hit[1]


# --- verification -----------------------------------------------------------

@dataclass
class VerificationReport:
    violations: list = field(default_factory=list)  # (a, b, g) with a < b, g in cone, g outside
    dihedral_violations: list = field(default_factory=list)  # planes (angular id tuples)
    planes_checked: int = 0
    roots: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations and not self.dihedral_violations

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "roots": self.roots,
            "planes_checked": self.planes_checked,
            "violations": [list(v) for v in self.violations],
            "dihedral_violations": [list(p) for p in self.dihedral_violations],
        }


def verify_reflection_order(t: TruncatedOrder) -> VerificationReport:
    """Check betweenness for every pair and every root of the slice in their cone.

    Candidates are bucketed by plane: in a plane, cone(a, b) is the angular
    sector between a and b, so the order restricted to each plane must be
    monotone along the angular sequence (one of the two dihedral orders).
    Violating triples are enumerated only on planes that fail that test.
    """
    pos = t.position
    report = VerificationReport(roots=len(t))
    for ids in t.slice.planes.planes.values():
        if len(ids) < 3:
            continue
        report.planes_checked += 1
        p = [pos[i] for i in ids]
        inc = all(x < y for x, y in zip(p, p[1:]))
        dec = all(x > y for x, y in zip(p, p[1:]))
        if inc or dec:
            continue
        report.dihedral_violations.append(tuple(ids))
        m = len(ids)
        for i in range(m):
            for j in range(i + 2, m):
                lo, hi = (ids[i], ids[j]) if p[i] < p[j] else (ids[j], ids[i])
                for k in range(i + 1, j):
                    if not (pos[lo] < p[k] < pos[hi]):
                        report.violations.append((lo, hi, ids[k]))
    report.violations.sort(key=lambda v: (pos[v[0]], pos[v[1]], v[2]))
    return report


# --- conjugates and initial segments -----------------------------------------

def upper_s_conjugate(t: TruncatedOrder, s: int) -> TruncatedOrder:
    """The order in which alpha_s becomes maximal.

    Roots below alpha_s keep their order; a root d above alpha_s takes the old
    place of s(d); alpha_s goes last. s can raise depth by one, so the result
    lives on the depth-(d-1) sub-slice unless the slice is saturated.
    """
    sl = t.slice
    a_s = sl.lookup(_simple(s, sl))
    if a_s is None:
        raise ValueError(f"alpha_{s} is not in the slice")
    domain = sl if sl.saturated else sl.truncate(sl.depth_bound - 1)
    pos = t.position
    ps = pos[a_s]
    keyed = []
    for r in domain:
        if r.id == a_s:
            continue
        if pos[r.id] < ps:
            keyed.append(((0, pos[r.id]), r.id))
        else:
            image = sl.lookup(reflect(r.coeffs, s, sl.gram))
            assert image is not None, "s-image left the slice"
            keyed.append(((1, pos[image]), r.id))
    keyed.sort()
    ids = tuple(rid for _, rid in keyed) + (a_s,)
    return TruncatedOrder(domain, ids, Explicit(ids))


def _simple(i: int, sl: RootSlice) -> tuple:
    v = simple_root(i, sl.rank)
    return tuple(float(x) for x in v) if sl.mode is Mode.APPROX else v


def _simple_index(v, mode: Mode) -> Optional[int]:
    nz = [i for i, x in enumerate(v) if (abs(x) > EPS if mode is Mode.APPROX else x != 0)]
    if len(nz) == 1:
        x = v[nz[0]]
        if (abs(x - 1) < 1e-9) if mode is Mode.APPROX else x == 1:
            return nz[0]
    return None


def initial_segment_word(t: TruncatedOrder, n: int) -> Word:
    """Peel the order's minimum n times, recording the simple reflections used.

    Position k holds r1...r_{k-1}(alpha_{r_k}). When the order is known on
    every root (lexicographic specs) the peel takes the least conjugated simple
    root by comparator, so it may pass the slice depth; the slice then serves
    as a check that no slice root sneaks in before the peeled prefix ends.
    """
    sl = t.slice
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > len(sl):
        raise ValueError("n exceeds the slice size")
    gram, mode = sl.gram, sl.mode
    key = t.spec.root_key(mode)
    letters: list = []
    if key is None:
        for k in range(n):
            beta = sl.coeffs(t.sorted_ids[k])
            v = beta
            for s in letters:
                v = reflect(v, s, gram)
            j = _simple_index(v, mode)
            if j is None:
                raise NotAnInversionPrefix(k + 1, f"root {beta} does not peel to a simple root")
            letters.append(j)
        return Word(tuple(letters), reduced=is_reduced(letters, gram))

    betas = []
    for k in range(n):
        best = None
        for j in range(sl.rank):
            v = apply_word(letters, _simple(j, sl), gram)
            if not is_positive_vector(v, mode):
                continue
            kv = key(v)
            if best is None or kv < best[0]:
                best = (kv, j, v)
        letters.append(best[1])
        betas.append(best[2])
    # slice cross-check: the first m order elements, then nothing else below beta_n
    keys = [key(b) for b in betas]
    seen = set()
    for k, b in enumerate(betas):
        if any(key_of(b, mode) == x for x in seen):
            raise NotAnInversionPrefix(k + 1, "repeated inversion root")
        seen.add(key_of(b, mode))
    in_slice = [sl.lookup(b) for b in betas]
    for k in range(n):
        if in_slice[k] is None:
            break
        if k >= len(t.sorted_ids) or t.sorted_ids[k] != in_slice[k]:
            raise NotAnInversionPrefix(k + 1, "truncated order disagrees with the peel")
    last = max(keys)
    chosen = {i for i in in_slice if i is not None}
    for r in sl:
        if r.id not in chosen and key(r.coeffs) < last:
            k = next(i for i, kb in enumerate(keys) if key(r.coeffs) < kb)
            raise NotAnInversionPrefix(k + 1, f"slice root {r.coeffs} precedes the peeled prefix")
    return Word(tuple(letters), reduced=is_reduced(letters, gram))


def a_infinity_order(n_max: int) -> TruncatedOrder:
    """The block order on type A_{n_max}, a finite window of the A-infinity order."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    sl = generate_slice(type_a(n_max), n_max)
    return sort_truncation(sl, AInfinityBlock())


# --- Lemma-anynumber construction -------------------------------------------

@dataclass(frozen=True)
class EConstruction:
    anchors: tuple  # the k+1 cone-crossing roots, in order
    parts: tuple  # U_1 < ... < U_k as id tuples


def build_E(
    slice_: RootSlice,
    spec: ReflectionOrderSpec,
    k: int,
    closeness: float = 0.05,
    order: Optional[TruncatedOrder] = None,
) -> list:
    """k consecutive dihedral intervals U_1 < ... < U_k; see ``e_construction``."""
    return list(e_construction(slice_, spec, k, closeness, order).parts)


def e_construction(
    slice_: RootSlice,
    spec: ReflectionOrderSpec,
    k: int,
    closeness: float = 0.05,
    order: Optional[TruncatedOrder] = None,
) -> EConstruction:
    """k consecutive dihedral intervals U_1 < ... < U_k under the order.

    Picks k+1 roots whose normalized forms have B-value below ``closeness``
    and whose pairwise chords cross the isotropic cone, sorts them by the
    order, and returns the slice roots of each consecutive pair's dihedral
    subgroup inside the pair's order interval (half-open except the last).
    """
    from .projective import normalize, qform, segment_meets_cone
    from .subgroups import dihedral_closure

    if k < 1:
        raise ValueError("k must be >= 1")
    if slice_.rank != 3:
        raise ValueError("build_E needs a rank-3 slice")
    gram, mode = slice_.gram, slice_.mode
    bound = Fraction(str(closeness)) if mode is Mode.EXACT else float(closeness)
    normed = {}
    for r in slice_:
        p = normalize(r.id, slice_)
        if qform(p, gram) < bound:
            normed[r.id] = p
    chosen = _clique(list(normed), k + 1,
                     lambda a, b: segment_meets_cone(normed[a], normed[b], gram).intersects)
    if chosen is None:
        raise InsufficientCandidates(
            f"no {k + 1} pairwise cone-crossing roots with qform < {closeness} at depth {slice_.depth_bound}"
        )
    t = order if order is not None else sort_truncation(slice_, spec)
    pos = t.position
    chosen.sort(key=pos.__getitem__)
    parts = []
    for i in range(k):
        a, b = chosen[i], chosen[i + 1]
        lo, hi = pos[a], pos[b]
        sub = dihedral_closure(a, b, slice_)
        last = i == k - 1
        members = [r for r in sub.positive_roots_in_slice
                   if lo <= pos[r] and (pos[r] <= hi if last else pos[r] < hi)]
        parts.append(tuple(sorted(members, key=pos.__getitem__)))
    return EConstruction(tuple(chosen), tuple(parts))


def _clique(cands: list, size: int, edge) -> Optional[list]:
    """Greedy-with-backtracking search for ``size`` pairwise-adjacent candidates."""
    budget = [200_000]

    def extend(chosen, start):
        if len(chosen) == size:
            return chosen
        for idx in range(start, len(cands)):
            budget[0] -= 1
            if budget[0] < 0:
                return None
            c = cands[idx]
            if all(edge(c, x) for x in chosen):
                got = extend(chosen + [c], idx + 1)
                if got is not None:
                    return got
        return None

    return extend([], 0)
