import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stablemod import exactla as la


def arr(rows):
    return np.array(rows, dtype=np.int64)


def test_rank_zero_matrix():
    assert la.rank(la.zeros(3, 3), 2) == 0


def test_rank_identity():
    assert la.rank(la.eye(4), 3) == 4


def test_rank_repeated_rows_f2():
    assert la.rank(arr([[1, 1], [1, 1]]), 2) == 1


def test_solve_identity():
    x = la.solve(la.eye(2), arr([1, 0]), 3)
    assert np.array_equal(x, arr([1, 0]))


def test_solve_inconsistent():
    assert la.solve(la.zeros(2, 2), arr([1, 0]), 2) is None


def test_solve_back_substitution_f2():
    x = la.solve(arr([[1, 1], [0, 1]]), arr([0, 1]), 2)
    assert np.array_equal(x, arr([1, 1]))


def test_kernel_identity_empty():
    assert la.kernel_basis(la.eye(3), 5).shape == (3, 0)


def test_kernel_zero_full():
    k = la.kernel_basis(la.zeros(4, 4), 2)
    assert k.shape == (4, 4)
    assert la.rank(k, 2) == 4


def test_kernel_row_f2():
    k = la.kernel_basis(arr([[1, 1]]), 2)
    assert k.shape == (2, 1)
    assert np.array_equal(k[:, 0], arr([1, 1]))


def test_quotient_full_space():
    reps = la.quotient_basis(la.eye(2), la.zeros(2, 0), 2)
    assert reps.shape[1] == 2


def test_quotient_equal_spaces():
    reps = la.quotient_basis(la.eye(2), la.eye(2), 2)
    assert reps.shape[1] == 0


def test_quotient_line_in_plane():
    reps = la.quotient_basis(la.eye(2), arr([[1], [1]]), 2)
    assert reps.shape[1] == 1


def test_quotient_containment_violation():
    with pytest.raises(ValueError):
        la.quotient_basis(arr([[1], [0]]), arr([[0], [1]]), 2)


def test_inverse():
    a = arr([[1, 1], [0, 1]])
    inv = la.inverse(a, 3)
    assert np.array_equal(la.matmul(a, inv, 3), la.eye(2))


def random_matrix(draw, p, max_dim=6):
    rows = draw(st.integers(0, max_dim))
    cols = draw(st.integers(0, max_dim))
    entries = draw(st.lists(st.integers(0, p - 1), min_size=rows * cols,
                            max_size=rows * cols))
    return np.array(entries, dtype=np.int64).reshape(rows, cols)


@st.composite
def matrix_and_p(draw):
    p = draw(st.sampled_from([2, 3, 5]))
    return random_matrix(draw, p), p


@given(matrix_and_p())
@settings(max_examples=120, deadline=None)
def test_rank_nullity(mp):
    a, p = mp
    assert la.rank(a, p) + la.kernel_basis(a, p).shape[1] == a.shape[1]


@given(matrix_and_p())
@settings(max_examples=120, deadline=None)
def test_kernel_annihilates(mp):
    a, p = mp
    k = la.kernel_basis(a, p)
    if a.shape[1] and k.shape[1]:
        assert not la.matmul(a, k, p).any()


@given(matrix_and_p(), st.integers(0, 4))
@settings(max_examples=120, deadline=None)
def test_solve_recovers_consistent_rhs(mp, ncols):
    a, p = mp
    x = np.arange(a.shape[1] * ncols, dtype=np.int64).reshape(a.shape[1], ncols) % p
    b = la.matmul(a, x, p) if a.shape[1] else la.zeros(a.shape[0], ncols)
    got = la.solve(a, b, p)
    assert got is not None
    assert np.array_equal(la.matmul(a, got, p) if a.shape[1] else b, b)


@given(matrix_and_p())
@settings(max_examples=100, deadline=None)
def test_quotient_size(mp):
    a, p = mp
    if a.shape[1] < 2:
        return
    sub = a[:, :1]
    try:
        reps = la.quotient_basis(a, sub, p)
    except ValueError:
        return
    assert reps.shape[1] == la.rank(a, p) - la.rank(sub, p)


@given(st.data())
@settings(max_examples=80, deadline=None)
def test_gf2_matches_generic(data):
    a = random_matrix(data.draw, 2, max_dim=7)
    if a.size == 0:
        return
    red2, piv2 = la.rref(a, 2)
    redg, pivg = la._rref_generic(a, 2)
    assert piv2 == pivg
    assert np.array_equal(red2[: len(piv2)], redg[: len(pivg)])


def test_randomized_solve_still_solves():
    import random

    a = arr([[1, 1, 0], [0, 0, 1]])
    b = arr([1, 1])
    rng = random.Random(7)
    for _ in range(5):
        x = la.solve(a, b, 2, rng=rng)
        assert np.array_equal(la.matmul(a, x.reshape(-1, 1), 2)[:, 0], b)
