from fractions import Fraction
from math import comb

import pytest

from uqboson.fock import compose
from uqboson.qscalar import QLaurent, QRadical, make_backend, qint
from uqboson.realization import (BuildError, build, build_deformed_oscillators, build_dyson,
                                 build_hp, build_hp_deformed, gl_extend)


def num(q="7/10"):
    return make_backend("numeric", q=q)


def close(a, b, tol=1e-30):
    return abs(a - b) < tol


def test_dyson_h1_diagonal(laurent):
    r = build_dyson(1, 2, 3, laurent)
    assert [v.constant() for v in r.ops["h1"].diagonal_values(laurent.zero())] == [2, 0, -2, -4]


def test_dyson_entries_are_laurent(laurent):
    r = build_dyson(3, 2, 4, laurent)
    for op in r.ops.values():
        assert all(isinstance(v, QLaurent) for _, _, v in op.entries())


def test_dyson_e1_kills_boundary(laurent, numeric):
    for be in (laurent, numeric):
        r = build_dyson(1, 2, 4, be)
        assert r.ops["e1"].apply(r.basis.index[(3,)]) == {}


@pytest.mark.parametrize("p", [1, 2, 3, 5])
def test_dyson_ef_diagonal(laurent, p):
    r = build_dyson(1, p, 6, laurent)
    e, f = r.ops["e1"], r.ops["f1"]
    ef, fe = compose(e, f), compose(f, e)
    for l in range(6):
        assert ef.entry(l, l, QLaurent()) == qint(l + 1) * qint(p - l)
        assert fe.entry(l, l, QLaurent()) == qint(l) * qint(p - l + 1)


def test_dyson_numeric_orthonormal_witness():
    be = num("4/5")
    r = build_dyson(1, 2, 5, be)
    assert close(r.ops["f1"].entry(3, 2), be.ctx.sqrt(3))


def test_hp_two_dim_rep(radical):
    r = build_hp(1, 1, 1, radical)
    one = QRadical.from_laurent(1)
    assert r.ops["e1"].to_dense(QRadical()) == [[QRadical(), one], [QRadical(), QRadical()]]
    assert r.ops["f1"].to_dense(QRadical()) == [[QRadical(), QRadical()], [one, QRadical()]]
    assert [v.laurent_part().constant() for v in r.ops["h1"].diagonal_values()] == [1, -1]


def test_hp_e1_entry(radical):
    r = build_hp(1, 2, 2, radical)
    assert r.ops["e1"].entry(1, 2) == QRadical.sqrt([2])
    be = num()
    rn = build_hp(1, 2, 2, be)
    assert close(rn.ops["e1"].entry(1, 2), be.ctx.sqrt(qint(2).evaluate(be.qnum)))


@pytest.mark.parametrize("kind", ["hp", "hp-deformed"])
def test_hp_f1_annihilates_top_of_f0(kind, radical):
    r = build(kind, 1, 2, 3, radical)
    assert r.ops["f1"].apply(r.basis.index[(2,)]) == {}


def test_exact_radical_rejects_negative_radicand(radical):
    with pytest.raises(BuildError, match="negative radicand"):
        build_hp(1, 2, 5, radical)


def test_numeric_negative_radicand_policy():
    strict = make_backend("numeric", q="7/10", negative="error")
    with pytest.raises(BuildError, match="negative radicand"):
        build_hp(1, 2, 5, strict)
    build_hp(1, 2, 5, num())


def test_parameter_errors(laurent, radical):
    with pytest.raises(BuildError, match="integer p"):
        build_dyson(1, Fraction(5, 2), 3, laurent)
    with pytest.raises(BuildError):
        build_dyson(1, 2, 0, laurent)
    with pytest.raises(BuildError):
        build_hp(1, 2, 2, laurent)
    with pytest.raises(BuildError):
        build("spin", 1, 2, 2, radical)


@pytest.mark.parametrize("kind", ["dyson", "hp", "hp-deformed"])
def test_degree_homogeneity(kind):
    r = build(kind, 3, Fraction(5, 2), 4, num())
    for label, op in r.ops.items():
        want = {"e1": -1, "f1": 1}.get(label, 0)
        for i, j, _ in op.entries():
            assert r.basis.degree(i) - r.basis.degree(j) == want, label


@pytest.mark.parametrize("backend", ["exact-laurent", "exact-radical"])
def test_qh_times_qhbar_is_identity(backend):
    be = make_backend(backend)
    r = build_dyson(2, 3, 3, be)
    for i in (1, 2):
        prod = compose(r.ops[f"qh{i}"], r.ops[f"qhbar{i}"])
        assert all(v == be.one() for v in prod.diagonal_values())
        for j, x in enumerate(r.exponents[f"h{i}"]):
            assert r.ops[f"qh{i}"].entry(j, j) == be.qpow(x)


def test_weights_agree_between_kinds(radical, laurent):
    d = build_dyson(2, 2, 2, laurent)
    h = build_hp(2, 2, 2, radical)
    assert d.exponents == h.exponents


def test_deformed_oscillator_entries(radical):
    o = build_deformed_oscillators(1, 3, radical)
    one = QRadical.from_laurent(1)
    assert o.ops["atilde1m"].entry(0, 1) == one
    assert o.ops["atilde1p"].entry(1, 0) == one
    assert o.ops["atilde1p"].entry(2, 1) == QRadical.sqrt([2])
    assert o.exponents["Ntilde1"] == (0, 1, 2, 3)


@pytest.mark.parametrize("n,p", [(1, 1), (1, 2), (2, 1), (2, 2)])
def test_hp_deformed_equals_hp_exact(radical, n, p):
    a, b = build_hp(n, p, p, radical), build_hp_deformed(n, p, p, radical)
    for label in a.generators():
        assert sorted(a.ops[label].entries()) == sorted(b.ops[label].entries()), label


def test_hp_deformed_equals_hp_numeric():
    be = num()
    a, b = build_hp(2, 2, 2, be), build_hp_deformed(2, 2, 2, be)
    for label in a.generators():
        for i, j, v in a.ops[label].entries():
            assert close(v, b.ops[label].entry(i, j))
        assert a.ops[label].nnz() == b.ops[label].nnz()


def test_gl_extend(laurent):
    r = gl_extend(build_dyson(2, 3, 3, laurent))
    ident = r.ops["I"]
    assert all(v == laurent.const(3) for v in ident.diagonal_values())
    trace = sum((v for v in ident.diagonal_values()), QLaurent())
    assert trace == QLaurent.const(3 * comb(2 + 3, 2))
    for label in r.generators():
        g = r.ops[label]
        assert (compose(ident, g) - compose(g, ident)).nnz() == 0
