"""Finite-truncation diagnostics: stability, blocks, c-range, density, char3."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .core import CoxeterMatrix, RootSlice, generate_slice
from .errors import BlockViolation, ClosureEscapesSlice, RankUnsupported
from .orders import Lexicographic, ReflectionOrderSpec, TruncatedOrder, sort_truncation
from .projective import normalize, segment_meets_cone
from .scalars import Mode, fmt
from .subgroups import barycentric, dihedral_closure, fibers, plane_roots, subgroup_of_plane

TWO_THIRDS = Fraction(2, 3)


def report(lemma: str, params: dict, violations: list, counts: dict, inconclusive: bool = False) -> dict:
    status = "fail" if violations else ("inconclusive" if inconclusive else "pass")
    return {"lemma": lemma, "params": params, "status": status,
            "violations": violations, "counts": counts}


def _cstr(c) -> str:
    return fmt(c)


# --- stability ----------------------------------------------------------------

@dataclass(frozen=True)
class Adjacency:
    a: int
    b: int
    between: int  # probe-slice roots strictly between a and b

    @property
    def status(self) -> str:
        return f"Split({self.between})" if self.between else "Stable"


@dataclass
class StabilityReport:
    base_depth: int
    probe_depth: int
    adjacencies: list = field(default_factory=list)

    @property
    def splits(self) -> list:
        return [x for x in self.adjacencies if x.between]

    @property
    def split_count(self) -> int:
        return len(self.splits)

    def to_json(self) -> dict:
        return {
            "base_depth": self.base_depth,
            "probe_depth": self.probe_depth,
            "adjacencies": len(self.adjacencies),
            "splits": [[x.a, x.b, x.between] for x in self.splits],
        }


def _probe_slice(matrix: CoxeterMatrix, D: int, mode: Optional[Mode], probe: Optional[RootSlice]) -> RootSlice:
    if probe is not None:
        if probe.depth_bound < D:
            raise ValueError(f"probe slice has depth {probe.depth_bound} < {D}")
        return probe if probe.depth_bound == D else probe.truncate(D)
    return generate_slice(matrix, D, mode)


def stability(
    spec: ReflectionOrderSpec,
    matrix: CoxeterMatrix,
    d: int,
    D: int,
    *,
    mode: Optional[Mode] = None,
    restrict: Optional[Iterable[int]] = None,
    probe: Optional[RootSlice] = None,
) -> StabilityReport:
    """Adjacent pairs of the depth-d order and how many depth-D roots fall between.

    With ``restrict`` (ids of the probe slice) only those roots count, both as
    adjacencies and as witnesses.
    """
    if D < d:
        raise ValueError("probe depth must be >= base depth")
    big = _probe_slice(matrix, D, mode, probe)
    order = spec.order_ids(big)
    small = spec.order_ids(big.truncate(d))
    keep = None if restrict is None else set(restrict)
    if keep is not None:
        order = [i for i in order if i in keep]
        small = [i for i in small if i in keep]
    pos = {rid: k for k, rid in enumerate(order)}
    seq = [i for i in order if big[i].depth <= d]
    if seq != small:
        raise ValueError("depth-d order is not the restriction of the depth-D order")
    rep = StabilityReport(d, D)
    for a, b in zip(seq, seq[1:]):
        rep.adjacencies.append(Adjacency(a, b, pos[b] - pos[a] - 1))
    return rep


# --- block structure ------------------------------------------------------------

@dataclass
class BlockDecomposition:
    blocks: list  # (label, ids)

    def labels(self) -> list:
        return [label for label, _ in self.blocks]

    def to_json(self) -> dict:
        return {"blocks": [{"label": lab, "size": len(ids)} for lab, ids in self.blocks]}


def _check_universal3(slice_: RootSlice) -> None:
    if slice_.rank != 3:
        raise RankUnsupported("this diagnostic is defined for rank 3")
    m = slice_.matrix
    if any(m.entries[i][j] != float("inf") for i in range(3) for j in range(3) if i != j):
        raise ValueError("expected the rank-3 universal Coxeter matrix")


def block_decompose_universal(t: TruncatedOrder) -> BlockDecomposition:
    """Split a lexicographic order on the universal rank-3 group into c-blocks.

    c is the first barycentric coordinate: the parabolic block (c = 0) comes
    first, one fiber block per c in (0, 2/3], and alpha_1 alone at the end.
    """
    sl = t.slice
    _check_universal3(sl)
    mode = sl.mode
    cval = {rid: barycentric(sl.coeffs(rid), 0, mode) for rid in t.sorted_ids}
    blocks: list = []
    for rid in t.sorted_ids:
        c = cval[rid]
        if blocks and blocks[-1][0] == c:
            blocks[-1][1].append(rid)
        else:
            blocks.append((c, [rid]))
    seen = {}
    for k, (c, ids) in enumerate(blocks):
        if c in seen:
            raise BlockViolation(f"fiber c={_cstr(c)} is not contiguous", tuple(blocks[seen[c]][1][-1:] + ids[:1]))
        seen[c] = k
    cs = [c for c, _ in blocks]
    for (c1, i1), (c2, i2) in zip(blocks, blocks[1:]):
        if not c1 < c2:
            raise BlockViolation(f"block c={_cstr(c1)} precedes c={_cstr(c2)}", (i1[-1], i2[0]))
    if cs[0] != 0:
        raise BlockViolation("the parabolic block is not initial", tuple(blocks[0][1][:1]))
    a1 = sl.simple_id(0)
    if t.sorted_ids[-1] != a1 or blocks[-1][1] != [a1]:
        raise BlockViolation("alpha_1 is not alone at the end", (t.sorted_ids[-1],))
    for c, ids in blocks[1:-1]:
        if not 0 < c <= TWO_THIRDS:
            raise BlockViolation(f"observed c={_cstr(c)} outside (0, 2/3]", tuple(ids[:3]))
    out = []
    for c, ids in blocks:
        if c == 0:
            label = "Parabolic"
        elif c == 1:
            label = "Apex"
        else:
            label = f"Fiber({_cstr(c)})"
        out.append((label, ids))
    return BlockDecomposition(out)


# --- c-range and density ----------------------------------------------------------

def universal_count(d: int, rank: int = 3) -> int:
    """Roots of depth <= d in the universal group: rank * (rank-1)^k at depth k."""
    return sum(rank * (rank - 1) ** k for k in range(d + 1))


def certify_c_range(slice_: RootSlice) -> dict:
    _check_universal3(slice_)
    mode = slice_.mode
    fib = fibers(slice_, 0)
    bad = [r.id for r in slice_ if TWO_THIRDS < barycentric(r.coeffs, 0, mode) < 1]
    below = [c for c in fib if c < 1]
    apex = fib.get(1, [])
    expected = universal_count(slice_.depth_bound)
    violations = [{"root": rid, "coeffs": [fmt(x) for x in slice_.coeffs(rid)]} for rid in bad]
    if len(slice_) != expected:
        violations.append({"count": len(slice_), "expected": expected})
    if apex != [slice_.simple_id(0)]:
        violations.append({"apex": apex})
    return report("c-range", {"depth": slice_.depth_bound}, violations, {
        "roots": len(slice_),
        "expected_roots": expected,
        "distinct_c": len(fib),
        "max_c_below_1": _cstr(max(below)) if below else None,
        "in_open_interval": len(bad),
    })


def _cvalues(slice_: RootSlice, depth: int) -> list:
    mode = slice_.mode
    return sorted({barycentric(r.coeffs, 0, mode) for r in slice_ if r.depth <= depth})


def certify_density(slice_: RootSlice, d_lo: int, d_hi: int) -> dict:
    """Adjacent c-values in (0, 2/3) at depth d_lo and whether depth d_hi splits them."""
    _check_universal3(slice_)
    if not d_lo <= d_hi <= slice_.depth_bound:
        raise ValueError("need d_lo <= d_hi <= slice depth")
    lo = [c for c in _cvalues(slice_, d_lo) if 0 < c < TWO_THIRDS]
    hi = [c for c in _cvalues(slice_, d_hi) if 0 < c < TWO_THIRDS]
    import bisect
    unwitnessed = []
    for x, y in zip(lo, lo[1:]):
        k = bisect.bisect_right(hi, x)
        if not (k < len(hi) and hi[k] < y):
            unwitnessed.append([_cstr(x), _cstr(y)])
    by_depth = {d: len([c for c in _cvalues(slice_, d) if 0 < c < TWO_THIRDS]) for d in range(d_lo, d_hi + 1)}
    growth = [by_depth[d + 1] > by_depth[d] for d in range(d_lo, d_hi)]
    violations = [] if all(growth) else [{"distinct_c_not_increasing": by_depth}]
    pairs = max(len(lo) - 1, 0)
    return report("density", {"d_lo": d_lo, "d_hi": d_hi}, violations, {
        "pairs": pairs,
        "witnessed": pairs - len(unwitnessed),
        "unwitnessed": unwitnessed,
        "distinct_c_by_depth": {str(k): v for k, v in by_depth.items()},
    }, inconclusive=bool(unwitnessed))


# --- fiber coherence -----------------------------------------------------------------

def fiber_coherence(slice_: RootSlice, axis: int = 0) -> dict:
    """Each fiber with c in (0, 2/3) is one maximal infinite dihedral subgroup.

    The algebraic classification (canonical pair form value) is compared with
    the chord-meets-cone test on the pair's normalized roots.
    """
    _check_universal3(slice_)
    violations, disagreements, singletons, checked = [], 0, 0, 0
    for c, ids in fibers(slice_, axis).items():
        if not 0 < c < TWO_THIRDS:
            continue
        if len(ids) < 2:
            singletons += 1
            continue
        checked += 1
        plane = sorted(plane_roots(ids[0], ids[1], slice_))
        if plane != sorted(ids):
            violations.append({"c": _cstr(c), "issue": "fiber is not a full plane", "ids": ids[:5]})
            continue
        try:
            sub = subgroup_of_plane(ids, slice_)
        except ClosureEscapesSlice as exc:
            violations.append({"c": _cstr(c), "issue": str(exc)})
            continue
        g1, g2 = sub.canonical_pair
        geo = segment_meets_cone(normalize(g1, slice_), normalize(g2, slice_), slice_.gram).intersects
        if not sub.classification.infinite:
            violations.append({"c": _cstr(c), "issue": f"classified {sub.classification}"})
        if geo != sub.classification.infinite:
            disagreements += 1
            violations.append({"c": _cstr(c), "issue": "algebraic and geometric tests disagree"})
    return report("fiber-coherence", {"depth": slice_.depth_bound, "axis": axis}, violations, {
        "fibers_checked": checked,
        "singleton_fibers": singletons,
        "disagreements": disagreements,
    })


def transverse_fiber(slice_: RootSlice, axis: int = 1):
    """The most populated fiber along ``axis`` with c in (0, 2/3); ties go to smaller c."""
    best = None
    for c, ids in fibers(slice_, axis).items():
        if 0 < c < TWO_THIRDS and (best is None or len(ids) > len(best[1])):
            best = (c, ids)
    if best is None or len(best[1]) < 2:
        raise ValueError("no fiber with two or more roots")
    return best


# --- char3 ----------------------------------------------------------------------------

def char3_diagnostic(
    spec: ReflectionOrderSpec,
    matrix: CoxeterMatrix,
    U: Sequence[int],
    d: int,
    D: int,
    *,
    probe: Optional[RootSlice] = None,
) -> dict:
    """Consecutive U-roots at depth d whose full order interval grows by depth D.

    ``U`` holds probe-slice ids of the subgroup's roots; those of depth <= d
    form the pairs.
    """
    big = _probe_slice(matrix, D, None, probe)
    order = spec.order_ids(big)
    pos = {rid: k for k, rid in enumerate(order)}
    small_pos = {rid: k for k, rid in enumerate(i for i in order if big[i].depth <= d)}
    members = sorted((i for i in U if big[i].depth <= d), key=pos.__getitem__)
    growing = []
    for a, b in zip(members, members[1:]):
        grow = (pos[b] - pos[a]) - (small_pos[b] - small_pos[a])
        if grow > 0:
            growing.append([a, b, grow])
    pairs = max(len(members) - 1, 0)
    return {
        "d": d, "D": D,
        "pairs": pairs,
        "growing": len(growing),
        "fraction": (len(growing) / pairs) if pairs else 0.0,
        "growing_pairs": growing,
    }


def char3_ladder(spec, matrix, U_at, ladder: Sequence[tuple]) -> list:
    """Run char3_diagnostic per rung; ``U_at(slice)`` picks U's ids in a probe slice."""
    out = []
    for d, D in ladder:
        big = generate_slice(matrix, D)
        out.append(char3_diagnostic(spec, matrix, U_at(big), d, D, probe=big))
    return out


# --- two growing ends -----------------------------------------------------------------

def growing_ends(spec: ReflectionOrderSpec, E, slice_: RootSlice, d: int) -> list:
    """How each U_i of an E construction (made at depth d) refines in ``slice_``.

    U_i is regrown in the deeper slice as the dihedral subgroup of its two
    anchors, cut to the same order interval. An omega + omega* interval shows
    a single split adjacency whose filling roots arrive from both ends: some
    on each side of the isotropic cone.
    """
    order = spec.order_ids(slice_)
    pos = {rid: k for k, rid in enumerate(order)}
    gram = slice_.gram
    k = len(E.parts)
    out = []
    for i, part in enumerate(E.parts):
        a, b = E.anchors[i], E.anchors[i + 1]
        lo, hi = pos[a], pos[b]
        last = i == k - 1
        sub = dihedral_closure(a, b, slice_)
        members = sorted((r for r in sub.positive_roots_in_slice
                          if lo <= pos[r] and (pos[r] <= hi if last else pos[r] < hi)),
                         key=pos.__getitem__)
        rank_of = {rid: j for j, rid in enumerate(members)}
        shallow = [r for r in members if slice_[r].depth <= d]
        splits = []
        for j, (x, y) in enumerate(zip(shallow, shallow[1:])):
            fill = members[rank_of[x] + 1:rank_of[y]]
            if not fill:
                continue
            nx, ny = normalize(x, slice_), normalize(y, slice_)
            near_x = sum(1 for r in fill if not segment_meets_cone(nx, normalize(r, slice_), gram).intersects)
            near_y = sum(1 for r in fill if not segment_meets_cone(ny, normalize(r, slice_), gram).intersects)
            splits.append({"index": j, "pair": [x, y], "between": len(fill),
                           "near_low": near_x, "near_high": near_y})
        out.append({
            "size_d": len(shallow),
            "size_D": len(members),
            "consistent": tuple(shallow) == tuple(part),
            "splits": splits,
            "signature": len(splits) == 1 and splits[0]["near_low"] > 0 and splits[0]["near_high"] > 0,
        })
    return out
