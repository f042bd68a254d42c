from fractions import Fraction
from math import comb

import pytest

from uqboson.qscalar import QLaurent, make_backend, qint
from uqboson.realization import build_dyson, build_hp
from uqboson.repranalysis import (InsufficientTruncation, block_offdiagonal, classical_limit,
                                  classical_limit_for, f0_dimension, invariance_check,
                                  irreducibility_probe, unitarity_check, weights)


def num(q):
    return make_backend("numeric", q=q)


def test_weights_examples(laurent):
    w = dict(weights(build_dyson(1, 2, 3, laurent)))
    assert w[(1,)] == (0,)
    assert sum(w[(l,)][0] for l in range(3)) == 0
    assert sorted(w[(l,)][0] for l in range(3)) == [-2, 0, 2]
    w2 = dict(weights(build_dyson(2, 1, 2, laurent)))
    assert w2[(1, 0)] == (-1, 1)


def test_weights_reject_nondiagonal(laurent):
    r = build_dyson(1, 2, 3, laurent)
    with pytest.raises(ValueError):
        weights(r.with_op("h1", r.ops["e1"]))


@pytest.mark.parametrize("n,p", [(1, 1), (2, 2), (3, 2), (2, 4)])
def test_f0_dimension(n, p):
    r = build_hp(n, p, p, make_backend("exact-radical"))
    assert f0_dimension(n, p) == comb(n + p, n) == len(r.basis.band(0, p))


def test_dyson_invariance():
    for be in (make_backend("exact-laurent"), num("4/5")):
        r = build_dyson(1, 2, 5, be)
        f0 = invariance_check(r, "F0")
        assert not f0.invariant and set(f0.witnesses) == {"f1"}
        assert f0.witnesses["f1"]["col_state"] == [2] and f0.witnesses["f1"]["row_state"] == [3]
        assert invariance_check(r, "F1").invariant
    assert abs(float(f0.witnesses["f1"]["entry"]["numeric"]) - 3 ** 0.5) < 1e-12


def test_hp_invariance_and_blocks():
    r = build_hp(2, 1, 3, num("4/5"))
    assert invariance_check(r, "F0").invariant
    assert invariance_check(r, "F1").invariant
    assert set(block_offdiagonal(r).values()) == {0}


def test_invariance_needs_room(laurent):
    with pytest.raises(InsufficientTruncation):
        invariance_check(build_dyson(1, 2, 3, laurent), "F0")


def test_unitarity_examples():
    r = build_hp(1, 1, 1, num("4/5"))
    rep = unitarity_check(r)
    assert rep.passed and rep.witness is None
    assert unitarity_check(build_hp(2, 3, 3, num("4/5"))).passed


def test_dyson_unitarity_expect_fail():
    r = build_dyson(1, 2, 2, num("4/5"))
    with pytest.raises(ValueError):
        unitarity_check(r)
    rep = unitarity_check(r, expect_fail=True)
    assert rep.passed and float(rep.max_deviation) >= 1e-3
    assert rep.witness["pair"] == ["e1", "f1"]
    assert rep.witness["state_l"] == [1] and rep.witness["state_lprime"] == [0]


def test_unitarity_rejects_exact(radical):
    with pytest.raises(ValueError):
        unitarity_check(build_hp(1, 1, 1, radical))


def test_probe():
    r = build_hp(1, Fraction(5, 2), 8, num("9/10"))
    rep = irreducibility_probe(r)
    assert rep.passed and len(rep.coefficients) == 9
    ctx = r.backend.ctx
    q = ctx.mpf(9) / 10
    for d, text in rep.coefficients:
        x = Fraction(5, 2) - d
        want = (q ** x - q ** -x) / (q - 1 / q)
        assert abs(ctx.mpf(text) - want) < 1e-13


def test_probe_at_q_one():
    be = make_backend("numeric", q=1)
    rep = irreducibility_probe(build_dyson(1, Fraction(5, 2), 6, be))
    assert rep.passed
    assert [float(c) for _, c in rep.coefficients] == [2.5 - d for d in range(7)]


def test_probe_rejects_integer_p():
    with pytest.raises(ValueError):
        irreducibility_probe(build_hp(1, 2, 4, num("9/10")))


def test_dyson_limit_entry(laurent):
    r = build_dyson(1, 2, 3, laurent)
    assert r.ops["e1"].entry(0, 1).at_one() == QLaurent.const(2)
    assert classical_limit(r).passed


def test_ratio_at_one():
    for k in range(1, 11):
        assert (qint(k) / k).at_one() == QLaurent.const(1)


def test_hp_spin_half_limit(radical):
    rep = classical_limit(build_hp(1, 1, 1, radical))
    assert rep.passed


def test_limit_detects_mutation(laurent):
    r = build_dyson(2, 2, 3, laurent)
    bad = r.with_op("e2", r.ops["e2"].scale(QLaurent.const(2)))
    rep = classical_limit(bad)
    assert not rep.passed and rep.mismatch["label"] == "e2"


@pytest.mark.parametrize("kind", ["dyson", "hp"])
def test_limit_small_grid(kind):
    for n in (1, 2):
        for p in (1, 2):
            assert classical_limit_for(kind, n, p, 4).passed
