"""Loop-extension model of affine root systems and two-sided reflection orders."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import gcd
from typing import Optional, Sequence

from .core import (
    CoxeterMatrix,
    GramMatrix,
    RootSlice,
    affine_a,
    apply_word,
    generate_slice,
    gram_of,
    root_depth,
    simple_root,
)
from .errors import NotAPartition, NotFiniteType, SliceTooLarge, WordNotReduced
from .orders import ReflectionOrderSpec, TruncatedOrder
from .scalars import Mode, canon, is_positive_vector


@dataclass(frozen=True)
class FiniteRootDatum:
    matrix: CoxeterMatrix
    roots: tuple  # all of Phi0, positive first
    positive: tuple

    @property
    def negative(self) -> tuple:
        return tuple(tuple(-x for x in b) for b in self.positive)

    def is_positive(self, beta) -> bool:
        return tuple(beta) in set(self.positive)


def finite_datum(matrix: CoxeterMatrix, max_depth: int = 64, cap: int = 200_000) -> FiniteRootDatum:
    try:
        sl = generate_slice(matrix, max_depth, cap=cap)
    except SliceTooLarge:
        raise NotFiniteType("root generation exceeded the cap before saturating") from None
    if not sl.saturated:
        raise NotFiniteType(f"roots still appear at depth {max_depth}")
    pos = tuple(r.coeffs for r in sl)
    neg = tuple(tuple(-x for x in b) for b in pos)
    return FiniteRootDatum(matrix, pos + neg, pos)


@dataclass(frozen=True, order=True)
class AffineRoot:
    beta: tuple
    level: int

    def __post_init__(self):
        if self.level < 0:
            raise ValueError("level must be >= 0")
        if self.level == 0 and any(x < 0 for x in self.beta):
            raise ValueError("a negative finite root needs level > 0")


def alpha0(beta: Sequence, datum: FiniteRootDatum) -> AffineRoot:
    """The lowest affine root over beta: level 0 if beta > 0, else level 1."""
    beta = tuple(beta)
    return AffineRoot(beta, 0 if datum.is_positive(beta) else 1)


def tilde(A: Sequence, level_bound: int) -> list:
    """Loop extension of a set of finite roots, truncated at ``level_bound``."""
    out = []
    for beta in A:
        beta = tuple(beta)
        start = 0 if all(x >= 0 for x in beta) else 1
        out.extend(AffineRoot(beta, k) for k in range(start, level_bound + 1))
    return out


@dataclass(frozen=True)
class InfiniteReducedWordSpec:
    prefix: tuple
    period: tuple

    def __post_init__(self):
        if not self.period:
            raise ValueError("period must be non-empty")
        object.__setattr__(self, "prefix", tuple(self.prefix))
        object.__setattr__(self, "period", tuple(self.period))

    def letters(self, count: int) -> tuple:
        out = list(self.prefix[:count])
        while len(out) < count:
            out.extend(self.period)
        return tuple(out[:count])

    def __str__(self) -> str:
        pre = "".join(f"s{i + 1}" for i in self.prefix)
        per = "".join(f"s{i + 1}" for i in self.period)
        return f"{pre}({per})^inf"


class AffineModel:
    """An affine Coxeter matrix with its delta and finite root datum identified.

    delta spans the radical of the Gram matrix; the finite system lives on the
    nodes other than ``affine_node``.
    """

    def __init__(self, matrix: CoxeterMatrix, affine_node: Optional[int] = None, name: str = ""):
        self.matrix = matrix
        self.gram = gram_of(matrix)
        self.name = name or "affine"
        n = matrix.rank
        self.affine_node = n - 1 if affine_node is None else affine_node
        self.delta = _radical(self.gram)
        if self.delta[self.affine_node] == 0:
            raise ValueError("affine node has no delta component")
        keep = [i for i in range(n) if i != self.affine_node]
        self.finite_nodes = tuple(keep)
        sub = CoxeterMatrix(tuple(tuple(matrix.entries[i][j] for j in keep) for i in keep),
                            tuple(tuple(matrix.infinity_weights[i][j] for j in keep) for i in keep))
        self.datum = finite_datum(sub)

    @property
    def rank(self) -> int:
        return self.matrix.rank

    def embed(self, beta: Sequence) -> tuple:
        out = [0] * self.rank
        for k, i in enumerate(self.finite_nodes):
            out[i] = beta[k]
        return tuple(out)

    def to_vector(self, ar: AffineRoot) -> tuple:
        b = self.embed(ar.beta)
        return tuple(canon(x + ar.level * d) for x, d in zip(b, self.delta))

    def to_affine(self, v: Sequence) -> AffineRoot:
        level = Fraction(v[self.affine_node], self.delta[self.affine_node])
        if level.denominator != 1:
            raise ValueError(f"{v} has a fractional delta level")
        k = int(level)
        rest = [canon(x - k * d) for x, d in zip(v, self.delta)]
        beta = tuple(rest[i] for i in self.finite_nodes)
        if beta not in set(self.datum.roots):
            raise ValueError(f"{v} is not beta + k delta for a finite root beta")
        return AffineRoot(beta, k)

    def slice(self, depth: int) -> RootSlice:
        return generate_slice(self.matrix, depth)

    def target(self, sign: int, level_bound: int) -> list:
        base = self.datum.positive if sign > 0 else self.datum.negative
        return tilde(base, level_bound)


def _radical(gram: GramMatrix) -> tuple:
    """Primitive positive integer vector spanning the kernel of the Gram matrix."""
    n = gram.rank
    rows = [[Fraction(x) for x in row] for row in gram.entries]
    pivots = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, n) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        rows[r] = [x / rows[r][c] for x in rows[r]]
        for i in range(n):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(n) if c not in pivots]
    if len(free) != 1:
        raise ValueError(f"Gram matrix radical has dimension {len(free)}, expected 1")
    f = free[0]
    vec = [Fraction(0)] * n
    vec[f] = Fraction(1)
    for i, c in enumerate(pivots):
        vec[c] = -rows[i][f]
    den = 1
    for x in vec:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in vec]
    g = 0
    for x in ints:
        g = gcd(g, x)
    ints = [x // g for x in ints]
    if all(x <= 0 for x in ints):
        ints = [-x for x in ints]
    if any(x <= 0 for x in ints):
        raise ValueError("radical vector is not positive; matrix is not affine")
    return tuple(ints)


BUILTIN = {"A1~": 1, "A2~": 2}


@lru_cache(maxsize=None)
def affine_model(kind: str) -> AffineModel:
    """Built-in exact models: A1~ (one infinite bond) and A2~ (a 3-cycle)."""
    key = kind.replace("~", "").upper() + "~" if "~" in kind or kind.upper() in ("A1", "A2") else kind
    if key not in BUILTIN:
        raise ValueError(f"unknown affine type {kind!r}; expected one of {sorted(BUILTIN)}")
    return AffineModel(affine_a(BUILTIN[key]), name=key)


# --- inversion identity -------------------------------------------------------

@dataclass
class InversionReport:
    ok: bool
    sign: int
    level_bound: int
    letters_used: int
    inversions: list = field(default_factory=list)  # AffineRoot, in word order
    missing: list = field(default_factory=list)
    discrepancy: Optional[str] = None

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "sign": self.sign,
            "level_bound": self.level_bound,
            "letters_used": self.letters_used,
            "missing": [[list(a.beta), a.level] for a in self.missing],
            "discrepancy": self.discrepancy,
        }


def _inversion_stream(word: InfiniteReducedWordSpec, gram: GramMatrix, limit: int):
    """Yield (index, root) for prefix inversions, raising on non-reducedness."""
    letters = word.letters(limit)
    n = gram.rank
    seen = set()
    for m, s in enumerate(letters):
        v = apply_word(letters[:m], simple_root(s, n), gram)
        if not is_positive_vector(v, gram.mode) or v in seen:
            raise WordNotReduced(m + 1)
        seen.add(v)
        yield m, v


def check_inversion_identity(
    word: InfiniteReducedWordSpec,
    model: AffineModel,
    sign: int = 1,
    level_bound: int = 8,
    ambient: Optional[RootSlice] = None,
) -> InversionReport:
    """Do the word's prefix inversions run exactly through tilde(Phi0^sign)?

    Every inversion must lie in the target; every target root of level
    <= ``level_bound`` must occur. Inversions shallow enough for ``ambient``
    must also be stored there.
    """
    target = set(model.target(sign, level_bound))
    limit = 10 * len(target) + 50
    report = InversionReport(False, sign, level_bound, 0)
    remaining = set(target)
    for m, v in _inversion_stream(word, model.gram, limit):
        report.letters_used = m + 1
        try:
            ar = model.to_affine(v)
        except ValueError as exc:
            report.discrepancy = f"inversion {m + 1}: {exc}"
            return report
        report.inversions.append(ar)
        positive = model.datum.is_positive(ar.beta)
        if positive != (sign > 0):
            report.discrepancy = f"inversion {m + 1} = {ar} lies outside tilde(Phi0{'+' if sign > 0 else '-'})"
            return report
        if ambient is not None and root_depth(v, model.gram) <= ambient.depth_bound:
            if ambient.lookup(v) is None:
                report.discrepancy = f"inversion {m + 1} = {v} missing from the ambient slice"
                return report
        remaining.discard(ar)
        if not remaining:
            report.ok = True
            return report
    report.missing = sorted(remaining)
    report.discrepancy = f"{len(remaining)} target roots unseen after {limit} letters"
    return report


def _periods(n: int, max_len: int):
    for length in range(1, max_len + 1):
        for p in product(range(n), repeat=length):
            if any(p[i] == p[(i + 1) % length] for i in range(length)) and length > 1:
                continue
            if length == 1 and n > 1:
                continue
            yield p


def search_word(model: AffineModel, sign: int, level_bound: int = 8, max_period: int = 6) -> InfiniteReducedWordSpec:
    """Shortlex-least period whose powers exhaust tilde(Phi0^sign) to ``level_bound``."""
    for p in _periods(model.rank, max_period):
        word = InfiniteReducedWordSpec((), p)
        try:
            if check_inversion_identity(word, model, sign, level_bound).ok:
                return word
        except WordNotReduced:
            continue
    raise LookupError(f"no period of length <= {max_period} realizes the loop extension")


@lru_cache(maxsize=None)
def default_words(kind: str, level_bound: int = 8) -> tuple:
    model = affine_model(kind)
    return search_word(model, 1, level_bound), search_word(model, -1, level_bound)


# --- the two-sided order -----------------------------------------------------

def two_sided_ids(word_a: InfiniteReducedWordSpec, word_b: InfiniteReducedWordSpec, slice_: RootSlice) -> list:
    """Slice ids: word_a inversions ascending, then word_b inversions descending."""
    gram = slice_.gram
    top = max(r.depth for r in slice_)

    def collect(word):
        got = []
        streak = 0
        patience = len(word.prefix) + 2 * len(word.period) + 2
        for _, v in _inversion_stream(word, gram, 50 * len(slice_) + 200):
            rid = slice_.lookup(v)
            if rid is not None:
                got.append(rid)
                streak = 0
            elif root_depth(v, gram) > top:
                streak += 1
                if streak >= patience and len(got) > 0:
                    break
        return got

    a, b = collect(word_a), collect(word_b)
    both = set(a) & set(b)
    if both:
        raise NotAPartition(f"roots {sorted(both)[:5]} are inversions of both words")
    missing = set(range(len(slice_))) - set(a) - set(b)
    if missing:
        raise NotAPartition(f"roots {sorted(missing)[:5]} are inversions of neither word")
    return a + b[::-1]


@dataclass(frozen=True)
class AffineTwoSided(ReflectionOrderSpec):
    """word_a's inversions in word order, then word_b's inversions reversed."""

    word_a: InfiniteReducedWordSpec
    word_b: InfiniteReducedWordSpec
    positive_system_choice: int = 1

    def order_ids(self, slice_: RootSlice) -> list:
        a, b = self.word_a, self.word_b
        if self.positive_system_choice < 0:
            a, b = b, a
        return two_sided_ids(a, b, slice_)

    def label(self) -> str:
        return f"affine:{self.word_a}|{self.word_b}"


def two_sided_spec(kind: str, level_bound: int = 8) -> AffineTwoSided:
    wa, wb = default_words(kind, level_bound)
    return AffineTwoSided(wa, wb)


def two_sided_order(
    word_a: InfiniteReducedWordSpec,
    word_b: InfiniteReducedWordSpec,
    slice_: RootSlice,
) -> TruncatedOrder:
    spec = AffineTwoSided(word_a, word_b)
    return TruncatedOrder(slice_, tuple(spec.order_ids(slice_)), spec)
