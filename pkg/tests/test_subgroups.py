import math
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from reflab.core import CoxeterMatrix, generate_slice, reflect_in_root, root_depth, type_a, universal
from reflab.errors import ClosureEscapesSlice, RankUnsupported
from reflab.projective import normalize, segment_meets_cone
from reflab.scalars import Mode
from reflab.subgroups import (
    INFINITE,
    classify,
    dihedral_closure,
    fiber,
    fibers,
    maximal_dihedral,
    plane_roots,
    subgroup_of_plane,
)


def test_parabolic_pair(universal_slice):
    sl = universal_slice(3)
    sub = dihedral_closure(1, 2, sl)
    assert sub.canonical_pair == (1, 2)
    assert sub.bform == -1 and sub.classification == INFINITE


def test_phi3_subgroup(universal_slice):
    sl = universal_slice(4)
    a, b = sl.lookup((2, 1, 0)), sl.lookup((2, 0, 1))
    sub = dihedral_closure(a, b, sl)
    assert set(sub.canonical_pair) == {a, b}
    assert sub.bform == -1 and sub.classification.infinite
    assert all(F(sl.coeffs(r)[0], sum(sl.coeffs(r))) == F(2, 3) for r in sub.positive_roots_in_slice)


def test_a2_dihedral():
    sl = generate_slice(type_a(2), 5)
    sub = dihedral_closure(0, 1, sl)
    assert str(sub.classification) == "Finite(3)"
    assert [sl.coeffs(r) for r in sub.positive_roots_in_slice] == [(1, 0), (1, 1), (0, 1)]


def test_maximal_first_coordinate_fiber(universal_slice):
    sl = universal_slice(5)
    sub = maximal_dihedral(sl.lookup((1, 2, 0)), sl.lookup((1, 0, 2)), sl)
    assert sub.classification.infinite
    ids = sub.positive_roots_in_slice
    assert len(ids) > 2
    assert all(F(sl.coeffs(r)[0], sum(sl.coeffs(r))) == F(1, 3) for r in ids)
    assert sorted(ids) == sorted(fiber(sl, 0, F(1, 3)))


def test_maximal_parabolic_plane(universal_slice):
    sl = universal_slice(4)
    sub = maximal_dihedral(0, 1, sl)
    assert all(sl.coeffs(r)[2] == 0 for r in sub.positive_roots_in_slice)
    assert set(sub.canonical_pair) == {0, 1}


@given(st.data())
def test_closure_inside_maximal(data):
    sl = generate_slice(universal(3), 4)
    a = data.draw(st.integers(0, len(sl) - 1))
    b = data.draw(st.integers(0, len(sl) - 1).filter(lambda x: x != a))
    try:
        small = dihedral_closure(a, b, sl)
        big = maximal_dihedral(a, b, sl)
    except ClosureEscapesSlice:
        return
    assert set(small.positive_roots_in_slice) <= set(big.positive_roots_in_slice)
    # every member lies in the cone of the canonical pair
    assert set(big.members(sl)) == set(big.positive_roots_in_slice)


def test_closure_escapes_slice():
    """Two A2 roots with B = 1/2 cannot be a canonical pair; the middle root is missing."""
    sl = generate_slice(type_a(2), 3)
    with pytest.raises(ClosureEscapesSlice):
        subgroup_of_plane([sl.lookup((1, 0)), sl.lookup((1, 1))], sl)


def test_classify_values():
    assert classify(F(-3, 2), Mode.EXACT) == INFINITE
    assert str(classify(0, Mode.EXACT)) == "Finite(2)"
    assert classify(F(-1, 3), Mode.EXACT) is None
    assert str(classify(-math.cos(math.pi / 7), Mode.APPROX)) == "Finite(7)"
    assert classify(-1.0 - 1e-12, Mode.APPROX).infinite


def test_approx_finite_dihedral():
    sl = generate_slice(CoxeterMatrix(((1, 5), (5, 1))), 10)
    assert len(sl) == 5 and sl.mode is Mode.APPROX
    assert str(dihedral_closure(0, 1, sl).classification) == "Finite(5)"


def test_fiber_examples(universal_slice):
    sl = universal_slice(4)
    assert sorted(fiber(sl, 0, 0)) == sorted(r.id for r in sl if r.coeffs[0] == 0)
    top = fiber(sl, 0, F(2, 3))
    assert len(top) >= 3
    assert len(set(plane_roots(top[0], top[1], sl)) & set(top)) == len(top)
    for d in range(2, 9):
        assert fiber(universal_slice(d), 0, F(5, 6)) == []


def test_fibers_rank_check():
    with pytest.raises(RankUnsupported):
        fibers(generate_slice(type_a(2), 2))


def test_classification_matches_cone_test_on_all_rich_planes(universal_slice):
    sl = universal_slice(6)
    g = sl.gram
    checked = 0
    for ids in sl.planes.rich(3).values():
        sub = subgroup_of_plane(ids, sl)
        g1, g2 = sub.canonical_pair
        geo = segment_meets_cone(normalize(g1, sl), normalize(g2, sl), g).intersects
        assert geo == sub.classification.infinite
        checked += 1
    assert checked == 1020


@given(st.data())
def test_classification_matches_cone_test_on_pairs(data):
    sl = generate_slice(universal(3), 6)
    a = data.draw(st.integers(0, len(sl) - 1))
    b = data.draw(st.integers(0, len(sl) - 1).filter(lambda x: x != a))
    try:
        sub = dihedral_closure(a, b, sl)
    except ClosureEscapesSlice:
        return
    g1, g2 = sub.canonical_pair
    geo = segment_meets_cone(normalize(g1, sl), normalize(g2, sl), sl.gram).intersects
    assert geo == sub.classification.infinite


@pytest.mark.parametrize("d", range(2, 7))
def test_fibers_keep_growing(d, universal_slice):
    """Each fiber in (0, 2/3) has members beyond the slice.

    Walking the dihedral sequence g1, s_g1(g2), s_g1 s_g2(g1), ... leaves the
    slice at some point; that root has the same c and a larger depth.
    """
    sl = universal_slice(d)
    for c, ids in fibers(sl, 0).items():
        if not 0 < c < F(2, 3):
            continue
        g1, g2 = subgroup_of_plane(ids, sl).canonical_coeffs
        mirrors = [g1, g2]
        for k in range(1, 60):
            v = mirrors[(k - 1) % 2]
            for j in reversed(range(k - 1)):
                v = reflect_in_root(v, mirrors[j % 2], sl.gram)
            if sl.lookup(v) is None:
                break
        else:
            pytest.fail(f"fiber {c} did not leave the slice")
        assert all(x >= 0 for x in v)
        assert F(v[0], sum(v)) == c
        assert root_depth(v, sl.gram) > d


def test_fiber_growth_is_slow_for_deep_fibers(universal_slice):
    sl = universal_slice(12)
    sizes = [len(fiber(sl.truncate(d), 0, F(1, 33))) for d in range(4, 13)]
    assert sizes == [2] * 9


def test_swap_symmetry(universal_slice):
    sl = universal_slice(7)
    coeffs = {r.coeffs for r in sl}
    assert all((a, c, b) in coeffs for a, b, c in coeffs)
