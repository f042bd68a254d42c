import itertools
from math import comb

import pytest

from uqboson.fock import (BasisMismatchError, SparseOp, cao_action, commutator, compose, diag_fn,
                          enumerate_basis, lower_op, number_op, q_commutator, raise_op, total_number)
from uqboson.qscalar import make_backend


def brute_force(n, L):
    return sorted(s for s in itertools.product(range(L + 1), repeat=n) if sum(s) <= L)


@pytest.mark.parametrize("n", range(1, 5))
@pytest.mark.parametrize("L", range(0, 7))
def test_basis_size_and_content(n, L):
    b = enumerate_basis(n, L)
    assert len(b) == comb(n + L, n)
    assert sorted(b.states) == brute_force(n, L)
    assert all(b.index[s] == i for i, s in enumerate(b.states))


def test_basis_order():
    b = enumerate_basis(2, 2)
    assert b.states == ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2))
    assert b.degrees() == [0, 1, 1, 2, 2, 2]


def test_band_is_contiguous():
    b = enumerate_basis(3, 5)
    for lo in range(6):
        for hi in range(lo, 6):
            idx = list(b.band(lo, hi))
            assert idx == [i for i, d in enumerate(b.degrees()) if lo <= d <= hi]
    assert list(b.band(0, -1)) == []


def test_cao_action():
    assert cao_action((2, 1), [(0, -1)]) == ((1, 1), 2, 2)
    assert cao_action((0, 1), [(0, -1)]) is None
    # rightmost acts first: a_1^+ a_2^- on (0, 2)
    assert cao_action((0, 2), [(0, +1), (1, -1)]) == ((1, 1), 2, 2)


def test_commutator_of_oscillators(laurent):
    """[a^-, a^+] = 1 in the monomial convention away from the cutoff."""
    b = enumerate_basis(2, 4)
    for i in (1, 2):
        c = commutator(lower_op(b, laurent, i), raise_op(b, laurent, i))
        for j in b.band(0, 3):
            assert c.apply(j) == {j: laurent.one()}


def test_number_operator_from_product(radical):
    b = enumerate_basis(2, 4)
    prod = compose(raise_op(b, radical, 1), lower_op(b, radical, 1))
    assert (prod - number_op(b, radical, 1)).nnz() == 0
    tot = number_op(b, radical, 1) + number_op(b, radical, 2)
    assert (tot - total_number(b, radical)).nnz() == 0


def test_raise_is_lossy_at_top(laurent):
    b = enumerate_basis(1, 3)
    up = raise_op(b, laurent, 1)
    assert up.lossy and up.shift == 1
    assert up.apply(b.index[(3,)]) == {}
    assert not lower_op(b, laurent, 1).lossy


def test_sparse_algebra(numeric):
    b = enumerate_basis(2, 3)
    a = raise_op(b, numeric, 1)
    c = lower_op(b, numeric, 2)
    assert (compose(a, c) - (a @ c)).nnz() == 0
    assert (a - a).nnz() == 0
    assert q_commutator(a, c, numeric.q()).nnz() > 0
    assert a.transpose().transpose().to_dense() == a.to_dense()
    d = diag_fn(b, lambda s: numeric.const(s[0] + 1))
    assert d.is_diagonal()
    assert [float(x) for x in d.diagonal_values()] == [s[0] + 1 for s in b.states]


def test_basis_mismatch(laurent):
    with pytest.raises(BasisMismatchError):
        compose(SparseOp(enumerate_basis(1, 2)), SparseOp(enumerate_basis(1, 3)))


def test_restrict(laurent):
    big, small = enumerate_basis(2, 4), enumerate_basis(2, 2)
    op = raise_op(big, laurent, 1).restrict(small)
    assert op.basis == small
    assert op.nnz() == len(list(small.band(0, 1)))


def test_mode_range(laurent):
    with pytest.raises(IndexError):
        raise_op(enumerate_basis(2, 2), laurent, 3)
