import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stablemod import algebra as ag
from stablemod import exactla as la


def test_algebra_dimension():
    assert ag.ElemAbelianAlgebra(2, 3).dim == 8
    assert ag.ElemAbelianAlgebra(3, 2).dim == 9


def test_nonprime_rejected():
    with pytest.raises(ValueError):
        ag.ElemAbelianAlgebra(4, 2)


def test_generator_nilpotent():
    alg = ag.ElemAbelianAlgebra(3, 2)
    g = ag.gen_matrix(3, 2, 0)
    assert la.matpow(g, 3, 3).any() == False


def test_generators_commute():
    g0 = ag.gen_matrix(2, 3, 0)
    g1 = ag.gen_matrix(2, 3, 1)
    assert np.array_equal(la.matmul(g0, g1, 2), la.matmul(g1, g0, 2))


def test_multiply_square_vanishes_p2():
    alg = ag.ElemAbelianAlgebra(2, 1)
    x = ag.linear_element(alg, np.array([1]))
    assert not ag.multiply(alg, x, x).any()


def test_multiply_unit():
    alg = ag.ElemAbelianAlgebra(3, 2)
    one = la.zeros(9, 1)[:, 0]
    one[0] = 1
    a = ag.linear_element(alg, np.array([1, 2]))
    assert np.array_equal(ag.multiply(alg, one, a), a)


def test_multiply_expansion_p3():
    # (X1+X2)^2 = X1^2 + 2 X1 X2 + X2^2 over p=3, r=2
    alg = ag.ElemAbelianAlgebra(3, 2)
    s = ag.linear_element(alg, np.array([1, 1]))
    sq = ag.multiply(alg, s, s)
    expected = la.zeros(9, 1)[:, 0]
    expected[2] = 1      # X1^2 has exponents (2,0): index 2
    expected[1 + 3] = 2  # X1 X2: index 4
    expected[6] = 1      # X2^2: index 6
    assert np.array_equal(sq, expected)


def test_is_flat_examples():
    assert ag.is_flat(ag.flat_map(2, 3, [(1, 0, 0)]))
    assert not ag.is_flat(ag.flat_map(2, 3, [(1, 0, 0), (1, 0, 0)]))
    assert ag.is_flat(ag.flat_map(2, 3, [(1, 1, 0), (0, 1, 1)]))


def test_complement_coordinate_case():
    f = ag.flat_map(2, 3, [(1, 0, 0)])
    g = ag.complement_flat(f)
    assert g.rows == ((0, 1, 0), (0, 0, 1))


def test_complement_full_rank_is_empty():
    f = ag.flat_map(2, 2, [(1, 0), (0, 1)])
    assert ag.complement_flat(f).s == 0


def test_complement_stacked_invertible():
    f = ag.flat_map(2, 2, [(1, 1)])
    g = ag.complement_flat(f)
    stacked = np.vstack([f.matrix, g.matrix])
    assert la.rank(stacked, 2) == 2
    assert g.rows == ((0, 1),)


def test_complement_nonflat_rejected():
    with pytest.raises(ValueError):
        ag.complement_flat(ag.flat_map(2, 2, [(1, 1), (1, 1)]))


def test_frame_from_point_examples():
    v = ag.parse_point("[1:0:0]", 2, 3)
    fr = ag.frame_from_point(v)
    assert fr.z.rows == ((1, 0, 0),)
    assert fr.h.rows == ((0, 1, 0), (0, 0, 1))

    v = ag.parse_point("[0:1:0]", 2, 3)
    fr = ag.frame_from_point(v)
    assert fr.z.rows == ((0, 1, 0),)
    assert fr.h.rows == ((1, 0, 0), (0, 0, 1))

    v = ag.parse_point("[1:1:0]", 2, 3)
    fr = ag.frame_from_point(v)
    assert la.rank(fr.stacked, 2) == 3


def test_frame_through_point():
    v = ag.parse_point("[1:0:0]", 2, 3)
    x = ag.parse_point("[0:0:1]", 2, 3)
    fr = ag.frame_through_point(v, x)
    assert fr.h.rows[0] == x.coords
    assert la.rank(fr.stacked, 2) == 3
    with pytest.raises(ValueError):
        ag.frame_through_point(v, v)


def test_projective_points_count():
    assert len(ag.projective_points(2, 3)) == 7
    assert len(ag.projective_points(3, 2)) == 4
    pts = ag.projective_points(5, 2)
    assert len(pts) == 6
    assert len(set(pts)) == 6


def test_point_normalization():
    v = ag.proj_point(3, (2, 1))
    assert v.coords == (1, 2)  # scaled by 2^{-1} = 2


def test_point_parse_format_roundtrip():
    v = ag.parse_point("[1:0:1]", 2, 3)
    assert str(v) == "[1:0:1]"
    with pytest.raises(ValueError):
        ag.parse_point("[0:0:0]", 2, 3)
    with pytest.raises(ValueError):
        ag.parse_point("[1:0]", 2, 3)


def test_flat_map_parse_format():
    f = ag.parse_flat_map("X1+X2, X3", 2, 3)
    assert f.rows == ((1, 1, 0), (0, 0, 1))
    assert ag.format_flat_map(f) == "X1+X2, X3"
    f2 = ag.parse_flat_map("2*X1+X2", 3, 2)
    assert f2.rows == ((2, 1),)
    with pytest.raises(ValueError):
        ag.parse_flat_map("X1, X1", 2, 2)


@st.composite
def point_data(draw):
    p = draw(st.sampled_from([2, 3]))
    r = draw(st.integers(1, 3))
    coords = draw(st.lists(st.integers(0, p - 1), min_size=r, max_size=r)
                  .filter(lambda c: any(c)))
    return p, r, coords


@given(point_data())
@settings(max_examples=80, deadline=None)
def test_linear_combinations_are_p_nilpotent(data):
    # (sum c_i X_i)^p = 0: what makes linear-part-only flat maps well defined
    p, r, coords = data
    alg = ag.ElemAbelianAlgebra(p, r)
    m = ag.element_matrix(alg, ag.linear_element(alg, np.array(coords)))
    assert not la.matpow(m, p, p).any()


@given(point_data())
@settings(max_examples=60, deadline=None)
def test_frame_always_invertible(data):
    p, r, coords = data
    v = ag.proj_point(p, coords)
    fr = ag.frame_from_point(v)
    assert la.rank(fr.stacked, p) == r
    g = fr.h
    stacked = np.vstack([fr.z.matrix, g.matrix])
    assert np.array_equal(la.matmul(fr.inverse(), stacked, p), la.eye(r))


def test_substitution_matrix_is_algebra_iso_for_frames():
    v = ag.proj_point(2, (1, 1, 0))
    fr = ag.frame_from_point(v)
    alg = ag.ElemAbelianAlgebra(2, 3)
    sub = ag.substitution_matrix(alg, fr.stacked)
    assert la.rank(sub, 2) == alg.dim
