"""Coxeter matrices, the bilinear form, and breadth-first root slices."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Iterator, Optional, Sequence

from .errors import ExactModeUnavailable, InvalidMatrix, NotARoot, SliceTooLarge
from .scalars import (
    EPS,
    Mode,
    Scalar,
    canon,
    is_positive_vector,
    key_of,
    to_exact,
)

INF = math.inf
DEFAULT_CAP = 2_000_000


@dataclass(frozen=True)
class CoxeterMatrix:
    """Bond labels m(i, j) with optional weights for infinite bonds.

    ``infinity_weights[i][j]`` is the value of B(alpha_i, alpha_j) on an
    infinite bond (``None`` elsewhere); it defaults to -1.
    """

    entries: tuple
    infinity_weights: Optional[tuple] = None

    def __post_init__(self):
        n = len(self.entries)
        if n == 0:
            raise InvalidMatrix("rank must be positive")
        rows = []
        for i, row in enumerate(self.entries):
            if len(row) != n:
                raise InvalidMatrix(f"row {i} has length {len(row)}, expected {n}")
            rows.append(tuple(_label(x) for x in row))
        for i in range(n):
            if rows[i][i] != 1:
                raise InvalidMatrix(f"diagonal entry ({i},{i}) must be 1")
            for j in range(n):
                if rows[i][j] != rows[j][i]:
                    raise InvalidMatrix(f"entries ({i},{j}) and ({j},{i}) differ")
                if i != j and rows[i][j] < 2:
                    raise InvalidMatrix(f"off-diagonal entry ({i},{j}) must be >= 2")
        object.__setattr__(self, "entries", tuple(rows))

        weights = [[None] * n for _ in range(n)]
        given = self.infinity_weights
        for i in range(n):
            for j in range(n):
                if rows[i][j] != INF:
                    if given is not None and given[i][j] is not None:
                        raise InvalidMatrix(f"weight given on finite bond ({i},{j})")
                    continue
                w = -1 if given is None or given[i][j] is None else given[i][j]
                if isinstance(w, str):
                    w = to_exact(w)
                if w > -1:
                    raise InvalidMatrix(f"infinity weight ({i},{j}) = {w} must be <= -1")
                weights[i][j] = w
        for i in range(n):
            for j in range(n):
                if weights[i][j] != weights[j][i]:
                    raise InvalidMatrix(f"infinity weights ({i},{j}) not symmetric")
        object.__setattr__(self, "infinity_weights", tuple(tuple(r) for r in weights))

    @property
    def rank(self) -> int:
        return len(self.entries)

    def exact_available(self) -> bool:
        for i in range(self.rank):
            for j in range(self.rank):
                m = self.entries[i][j]
                if m == INF:
                    if isinstance(self.infinity_weights[i][j], float):
                        return False
                elif m not in (1, 2, 3):
                    return False
        return True

    def default_mode(self) -> Mode:
        return Mode.EXACT if self.exact_available() else Mode.APPROX

    def to_json(self) -> dict:
        ents = [["inf" if m == INF else m for m in row] for row in self.entries]
        weights = [[None if w is None else str(w) for w in row] for row in self.infinity_weights]
        return {"rank": self.rank, "entries": ents, "infinity_weights": weights}


def _label(x):
    if isinstance(x, str):
        if x.strip().lower() in ("inf", "infinity", "oo"):
            return INF
        x = int(x)
    if x == INF:
        return INF
    if isinstance(x, float):
        if not x.is_integer():
            raise InvalidMatrix(f"bond label {x} is not an integer")
        x = int(x)
    if not isinstance(x, int) or isinstance(x, bool):
        raise InvalidMatrix(f"bad bond label {x!r}")
    return x


def universal(rank: int, weight: Scalar = -1) -> CoxeterMatrix:
    """All bonds infinite with a common weight."""
    ents = [[1 if i == j else INF for j in range(rank)] for i in range(rank)]
    ws = [[None if i == j else weight for j in range(rank)] for i in range(rank)]
    return CoxeterMatrix(tuple(map(tuple, ents)), tuple(map(tuple, ws)))


def type_a(n: int) -> CoxeterMatrix:
    """Finite type A_n (a path of 3-bonds)."""
    ents = [[1 if i == j else (3 if abs(i - j) == 1 else 2) for j in range(n)] for i in range(n)]
    return CoxeterMatrix(tuple(map(tuple, ents)))


def affine_a(n: int) -> CoxeterMatrix:
    """Affine type A~_n on n+1 nodes; the last node is the affine one."""
    if n == 1:
        return universal(2)
    size = n + 1
    ents = []
    for i in range(size):
        row = []
        for j in range(size):
            if i == j:
                row.append(1)
            elif (i - j) % size in (1, size - 1):
                row.append(3)
            else:
                row.append(2)
        ents.append(tuple(row))
    return CoxeterMatrix(tuple(ents))


@dataclass(frozen=True)
class GramMatrix:
    entries: tuple
    mode: Mode

    @cached_property
    def twice(self) -> tuple:
        return tuple(tuple(canon(2 * x) for x in row) for row in self.entries)

    @property
    def rank(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]


def gram_of(matrix: CoxeterMatrix, mode: Mode | str | None = None) -> GramMatrix:
    mode = Mode(mode) if mode is not None else matrix.default_mode()
    if mode is Mode.EXACT and not matrix.exact_available():
        raise ExactModeUnavailable("bond labels outside {2, 3} give irrational form entries")
    n = matrix.rank
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            m = matrix.entries[i][j]
            if m == INF:
                w = matrix.infinity_weights[i][j]
                row.append(canon(Fraction(w)) if mode is Mode.EXACT else float(w))
            elif mode is Mode.EXACT:
                row.append({1: 1, 2: 0, 3: Fraction(-1, 2)}[m])
            else:
                row.append(1.0 if m == 1 else -math.cos(math.pi / m))
        rows.append(tuple(row))
    return GramMatrix(tuple(rows), mode)


def bform(u: Sequence[Scalar], v: Sequence[Scalar], gram: GramMatrix) -> Scalar:
    g = gram.entries
    n = len(u)
    total = 0
    for i in range(n):
        if u[i]:
            row = g[i]
            total += u[i] * sum(row[j] * v[j] for j in range(n) if v[j])
    return canon(total) if gram.mode is Mode.EXACT else total


def reflect(v: Sequence[Scalar], s: int, gram: GramMatrix) -> tuple:
    """Apply the simple reflection s: v - 2 B(v, alpha_s) alpha_s."""
    row = gram.twice[s]
    b2 = sum(row[j] * x for j, x in enumerate(v) if x)
    out = list(v)
    out[s] = canon(out[s] - b2) if gram.mode is Mode.EXACT else out[s] - b2
    return tuple(out)


def reflect_in_root(v: Sequence[Scalar], r: Sequence[Scalar], gram: GramMatrix) -> tuple:
    """Apply the reflection s_r of a real root r (B(r, r) = 1)."""
    c = 2 * bform(v, r, gram)
    if gram.mode is Mode.EXACT:
        return tuple(canon(x - c * y) for x, y in zip(v, r))
    return tuple(x - c * y for x, y in zip(v, r))


def simple_root(i: int, n: int) -> tuple:
    return tuple(1 if j == i else 0 for j in range(n))


@dataclass(frozen=True)
class Word:
    letters: tuple
    reduced: bool = False

    def __len__(self) -> int:
        return len(self.letters)


def apply_word(letters: Sequence[int], v: Sequence[Scalar], gram: GramMatrix) -> tuple:
    """Evaluate s_{l1} s_{l2} ... s_{lk} (v), rightmost letter first."""
    out = tuple(v)
    for s in reversed(letters):
        out = reflect(out, s, gram)
    return out


def inversion_roots(letters: Sequence[int], gram: GramMatrix) -> list:
    """The roots r1...r_{k-1}(alpha_{r_k}) of every prefix, in order."""
    n = gram.rank
    out = []
    for k, s in enumerate(letters):
        out.append(apply_word(letters[:k], simple_root(s, n), gram))
    return out


def is_reduced(letters: Sequence[int], gram: GramMatrix) -> bool:
    """A word is reduced iff every prefix inversion root is positive."""
    return all(is_positive_vector(r, gram.mode) for r in inversion_roots(letters, gram))


def root_depth(v: Sequence[Scalar], gram: GramMatrix, limit: int = 10_000) -> int:
    """BFS level of a positive root, found by greedy descent.

    If B(v, alpha_s) > 0 then s(v) sits one level lower, so descending until a
    simple root is reached counts the level without a slice.
    """
    mode = gram.mode
    v = tuple(v)
    if not is_positive_vector(v, mode):
        raise NotARoot(f"{v} is not a positive vector")
    n = gram.rank
    level = 0
    while True:
        nz = [i for i, x in enumerate(v) if (abs(x) > EPS if mode is Mode.APPROX else x != 0)]
        if len(nz) == 1:
            x = v[nz[0]]
            if (abs(x - 1) < 1e-7) if mode is Mode.APPROX else x == 1:
                return level
            raise NotARoot(f"{v} is a non-unit multiple of a simple root")
        for s in range(n):
            b = sum(gram.entries[s][j] * v[j] for j in range(n))
            if b > (EPS if mode is Mode.APPROX else 0):
                v = reflect(v, s, gram)
                break
        else:
            raise NotARoot(f"{v} cannot be descended to a simple root")
        if not is_positive_vector(v, mode):
            raise NotARoot("descent left the positive cone")
        level += 1
        if level > limit:
            raise NotARoot("descent did not terminate")


@dataclass(frozen=True)
class Root:
    id: int
    coeffs: tuple
    depth: int
    parent: Optional[tuple] = None  # (parent id, simple index)


@dataclass(frozen=True, eq=False)
class RootSlice:
    """All positive roots of BFS level <= depth_bound, ids by (depth, lex)."""

    matrix: CoxeterMatrix
    gram: GramMatrix
    depth_bound: int
    roots: tuple
    index: dict = field(repr=False)

    @property
    def mode(self) -> Mode:
        return self.gram.mode

    @property
    def rank(self) -> int:
        return self.matrix.rank

    def __len__(self) -> int:
        return len(self.roots)

    def __iter__(self) -> Iterator[Root]:
        return iter(self.roots)

    def __getitem__(self, rid: int) -> Root:
        return self.roots[rid]

    def coeffs(self, rid: int) -> tuple:
        return self.roots[rid].coeffs

    def lookup(self, v: Sequence[Scalar]) -> Optional[int]:
        return self.index.get(key_of(v, self.mode))

    def simple_id(self, i: int) -> int:
        rid = self.lookup(simple_root(i, self.rank))
        assert rid is not None
        return rid

    def truncate(self, depth: int) -> "RootSlice":
        """Sub-slice of depth <= depth; ids are unchanged."""
        if depth >= self.depth_bound:
            return self
        if depth < 0:
            raise ValueError("depth must be >= 0")
        roots = tuple(r for r in self.roots if r.depth <= depth)
        assert all(r.id == i for i, r in enumerate(roots))
        index = {key_of(r.coeffs, self.mode): r.id for r in roots}
        return RootSlice(self.matrix, self.gram, depth, roots, index)

    @property
    def saturated(self) -> bool:
        """True when no root sits at the last level (finite type reached)."""
        return not self.roots or self.roots[-1].depth < self.depth_bound

    @cached_property
    def planes(self):
        from .geometry import PlaneIndex

        return PlaneIndex(self)


def generate_slice(
    matrix: CoxeterMatrix,
    depth: int,
    mode: Mode | str | None = None,
    cap: int = DEFAULT_CAP,
) -> RootSlice:
    if depth < 0:
        raise ValueError("depth bound must be >= 0")
    gram = gram_of(matrix, mode)
    mode = gram.mode
    n = matrix.rank
    roots: list[Root] = []
    index: dict = {}
    for i in range(n):
        v = simple_root(i, n)
        if mode is Mode.APPROX:
            v = tuple(float(x) for x in v)
        index[key_of(v, mode)] = i
        roots.append(Root(i, v, 0, None))
    frontier = list(range(n))
    for level in range(1, depth + 1):
        found: dict = {}
        for pid in frontier:
            pv = roots[pid].coeffs
            for s in range(n):
                w = reflect(pv, s, gram)
                if not is_positive_vector(w, mode):
                    continue
                k = key_of(w, mode)
                if k in index or k in found:
                    continue
                found[k] = (w, pid, s)
        if len(roots) + len(found) > cap:
            raise SliceTooLarge(cap, level)
        frontier = []
        for k in sorted(found, reverse=True):
            w, pid, s = found[k]
            rid = len(roots)
            index[k] = rid
            roots.append(Root(rid, w, level, (pid, s)))
            frontier.append(rid)
        if not frontier:
            break
    return RootSlice(matrix, gram, depth, tuple(roots), index)


def lookup(v: Sequence[Scalar], slice_: RootSlice) -> Optional[int]:
    return slice_.lookup(v)


def root_to_reflection(rid: int, slice_: RootSlice) -> Word:
    """Palindromic word of the reflection of a stored root via parent links."""
    path = []
    r = slice_[rid]
    while r.parent is not None:
        pid, s = r.parent
        path.append(s)
        r = slice_[pid]
    seed = r.coeffs.index(next(x for x in r.coeffs if x))
    # path lists letters outermost first
    letters = tuple(path) + (seed,) + tuple(reversed(path))
    return Word(letters, reduced=True)


def root_word(rid: int, slice_: RootSlice) -> tuple:
    """(w, j) with r = w(alpha_j); w listed leftmost letter first."""
    path = []
    r = slice_[rid]
    while r.parent is not None:
        pid, s = r.parent
        path.append(s)
        r = slice_[pid]
    seed = next(i for i, x in enumerate(r.coeffs) if x)
    return tuple(path), seed


# --- matrix files -----------------------------------------------------------

def parse_matrix(data: dict) -> tuple[CoxeterMatrix, Optional[Mode]]:
    """Build a matrix from the JSON/TOML schema {rank, entries, infinity_weights, mode}."""
    try:
        rank = int(data["rank"])
        ents = data["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidMatrix(f"matrix file needs 'rank' and 'entries': {exc}") from None
    ents = _square(ents, rank, "entries")
    weights = data.get("infinity_weights")
    if weights is not None:
        weights = _square(weights, rank, "infinity_weights")
        weights = tuple(
            tuple(None if w is None or (isinstance(w, str) and w.lower() in ("", "none")) else w for w in row)
            for row in weights
        )
    mode = data.get("mode")
    matrix = CoxeterMatrix(tuple(tuple(r) for r in ents), weights)
    if mode is not None:
        try:
            mode = Mode(str(mode).lower())
        except ValueError:
            raise InvalidMatrix(f"unknown mode {mode!r}") from None
    return matrix, mode


def _square(values, rank: int, name: str) -> list:
    if not isinstance(values, list):
        raise InvalidMatrix(f"{name} must be a list")
    if len(values) == rank * rank and all(not isinstance(x, list) for x in values):
        return [values[i * rank:(i + 1) * rank] for i in range(rank)]
    if len(values) != rank or not all(isinstance(r, list) and len(r) == rank for r in values):
        raise InvalidMatrix(f"{name} must be {rank}x{rank} (nested or row-major flat)")
    return values


def load_matrix(path: str | Path) -> tuple[CoxeterMatrix, Optional[Mode]]:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".toml":
        import tomli

        try:
            data = tomli.loads(text)
        except tomli.TOMLDecodeError as exc:
            raise InvalidMatrix(f"{path}: {exc}") from None
    else:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidMatrix(f"{path}: {exc}") from None
    if not isinstance(data, dict):
        raise InvalidMatrix(f"{path}: top level must be an object")
    return parse_matrix(data)
