import pytest
from hypothesis import given, strategies as st

import oracles
from reflab.affine import (
    AffineRoot,
    AffineTwoSided,
    InfiniteReducedWordSpec,
    affine_model,
    alpha0,
    check_inversion_identity,
    default_words,
    finite_datum,
    tilde,
    two_sided_ids,
    two_sided_order,
)
from reflab.core import bform, generate_slice, type_a, universal
from reflab.errors import NotAPartition, NotFiniteType, WordNotReduced
from reflab.orders import sort_truncation, verify_reflection_order


def test_finite_datum():
    a1 = finite_datum(type_a(1))
    assert a1.positive == ((1,),) and len(a1.roots) == 2
    a2 = finite_datum(type_a(2))
    assert sorted(a2.positive) == [(0, 1), (1, 0), (1, 1)]
    assert a2.negative == tuple(tuple(-x for x in b) for b in a2.positive)
    with pytest.raises(NotFiniteType):
        finite_datum(universal(3), max_depth=10)


def test_affine_root_invariants():
    with pytest.raises(ValueError):
        AffineRoot((1,), -1)
    with pytest.raises(ValueError):
        AffineRoot((-1,), 0)
    d = finite_datum(type_a(2))
    assert alpha0((1, 1), d) == AffineRoot((1, 1), 0)
    assert alpha0((-1, 0), d) == AffineRoot((-1, 0), 1)


def test_tilde():
    assert tilde([(1,)], 2) == [AffineRoot((1,), 0), AffineRoot((1,), 1), AffineRoot((1,), 2)]
    assert tilde([(-1,)], 2) == [AffineRoot((-1,), 1), AffineRoot((-1,), 2)]


def test_models():
    a1, a2 = affine_model("A1~"), affine_model("A2~")
    assert a1.delta == (1, 1) and a2.delta == (1, 1, 1)
    for m in (a1, a2):
        assert all(bform(m.delta, tuple(1 if i == j else 0 for i in range(m.rank)), m.gram) == 0
                   for j in range(m.rank))
    with pytest.raises(ValueError):
        affine_model("B2~")


@given(st.integers(0, 6), st.sampled_from(["A1~", "A2~"]), st.data())
def test_vector_round_trip(level, kind, data):
    m = affine_model(kind)
    beta = data.draw(st.sampled_from(m.datum.roots))
    if level == 0 and any(x < 0 for x in beta):
        level = 1
    ar = AffineRoot(beta, level)
    v = m.to_vector(ar)
    assert m.to_affine(v) == ar
    # adding delta moves one level up and leaves the form unchanged
    up = tuple(x + d for x, d in zip(v, m.delta))
    assert m.to_affine(up) == AffineRoot(beta, level + 1)
    assert bform(up, up, m.gram) == bform(v, v, m.gram) == 1


def test_word_letters_and_str():
    w = InfiniteReducedWordSpec((2,), (0, 1))
    assert w.letters(5) == (2, 0, 1, 0, 1)
    assert str(w) == "s3(s1s2)^inf"
    with pytest.raises(ValueError):
        InfiniteReducedWordSpec((), ())


def test_a1_inversions():
    m = affine_model("A1~")
    rep = check_inversion_identity(InfiniteReducedWordSpec((), (0, 1)), m, 1, 5)
    assert rep.ok
    assert [m.to_vector(a) for a in rep.inversions] == [(k + 1, k) for k in range(6)]


def test_non_reduced_word():
    with pytest.raises(WordNotReduced) as err:
        check_inversion_identity(InfiniteReducedWordSpec((), (0, 0)), affine_model("A1~"), 1, 3)
    assert err.value.index == 2


def test_wrong_sign_reports_discrepancy():
    rep = check_inversion_identity(InfiniteReducedWordSpec((), (0, 1)), affine_model("A1~"), -1, 3)
    assert not rep.ok and "outside" in rep.discrepancy


@pytest.mark.parametrize("kind", ["A1~", "A2~"])
@pytest.mark.parametrize("sign", [1, -1])
def test_default_words_exhaust_target(kind, sign):
    """Independent check: the word's inversions, computed with the oracle reflections, are the target."""
    m = affine_model(kind)
    word = default_words(kind)[0 if sign > 0 else 1]
    L = 8
    target = {m.to_vector(a) for a in m.target(sign, L)}
    labels = [[1 if i == j else 3 for j in range(m.rank)] for i in range(m.rank)]
    if m.rank == 2:
        labels = [[1, 0], [0, 1]]  # 0 marks an infinite bond
    g = oracles.gram_exact(labels)
    seen = []
    letters = word.letters(4 * len(target))
    for k, s in enumerate(letters):
        v = tuple(1 if i == s else 0 for i in range(m.rank))
        for t in reversed(letters[:k]):
            v = oracles.refl(v, t, g)
        seen.append(v)
        if target <= set(seen):
            break
    assert len(seen) == len(set(seen))
    assert target <= set(seen)
    assert all(m.datum.is_positive(m.to_affine(v).beta) == (sign > 0) for v in seen)


@pytest.mark.parametrize("kind", ["A1~", "A2~"])
@pytest.mark.parametrize("depth", [3, 6])
def test_two_sided_partition_and_verify(kind, depth):
    m = affine_model(kind)
    sl = generate_slice(m.matrix, depth)
    wa, wb = default_words(kind)
    t = two_sided_order(wa, wb, sl)
    assert sorted(t.sorted_ids) == list(range(len(sl)))
    assert verify_reflection_order(t).ok
    n_plus = sum(1 for r in sl if m.datum.is_positive(m.to_affine(r.coeffs).beta))
    assert all(m.datum.is_positive(m.to_affine(sl.coeffs(r)).beta) for r in t.sorted_ids[:n_plus])
    # the other positive system gives the reverse order on each side
    flipped = sort_truncation(sl, AffineTwoSided(wa, wb, positive_system_choice=-1))
    assert verify_reflection_order(flipped).ok


def test_two_sided_a1_order():
    m = affine_model("A1~")
    sl = generate_slice(m.matrix, 4)
    t = two_sided_order(*default_words("A1~"), sl)
    assert [sl.coeffs(r) for r in t.sorted_ids] == [(k + 1, k) for k in range(5)] + [(k, k + 1) for k in reversed(range(5))]


def test_not_a_partition():
    m = affine_model("A1~")
    sl = generate_slice(m.matrix, 4)
    w = InfiniteReducedWordSpec((), (0, 1))
    with pytest.raises(NotAPartition, match="both"):
        two_sided_ids(w, w, sl)
    a2 = affine_model("A2~")
    sl2 = generate_slice(a2.matrix, 4)
    # Coxeter-element powers are reduced but their inversions miss whole strings of roots
    with pytest.raises(NotAPartition, match="neither"):
        two_sided_ids(InfiniteReducedWordSpec((), (0, 1, 2)), InfiniteReducedWordSpec((), (2, 1, 0)), sl2)
