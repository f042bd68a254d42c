"""Dyson and Holstein-Primakoff boson realizations of U_q[sl(n+1)].

Every generator image is a function of the number operators placed to the
left of a short string of creation/annihilation operators (CAOs).  Matrix
elements are computed state by state: the CAO string acts first and the
function is evaluated on the resulting occupation vector, which is the
ordering forced by ``f(N) a_j^+- = a_j^+- f(N +- e_j)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from types import MappingProxyType
from typing import Callable, Mapping

from .fock import FockBasis, OccVector, SparseOp, cao_op, compose, diag_fn, enumerate_basis
from .qscalar import NegativeRadicandError, to_fraction

KINDS = ("dyson", "hp", "hp-deformed")


class BuildError(ValueError):
    """A realization could not be materialized (bad parameters or a negative radicand)."""


@dataclass(frozen=True)
class Realization:
    n: int
    p: Fraction
    L: int
    backend: object
    kind: str
    basis: FockBasis = field(repr=False)
    ops: Mapping[str, SparseOp] = field(repr=False)
    # exact eigenvalues of diagonal labels, per basis state; used by qpow()
    exponents: Mapping[str, tuple[Fraction, ...]] = field(repr=False)

    @property
    def p_is_natural(self) -> bool:
        return self.p.denominator == 1 and self.p >= 1

    @property
    def closed(self) -> bool:
        """True when truncating at ``L`` loses nothing (HP with ``L == p``)."""
        return self.kind in ("hp", "hp-deformed") and self.p_is_natural and self.L == self.p

    def generators(self) -> list[str]:
        return [f"{g}{i}" for i in range(1, self.n + 1) for g in "hef"]

    def with_op(self, label: str, op: SparseOp) -> Realization:
        ops = dict(self.ops)
        ops[label] = op
        return replace(self, ops=MappingProxyType(ops))


@dataclass(frozen=True)
class DeformedOscillators:
    n: int
    L: int
    backend: object
    basis: FockBasis = field(repr=False)
    ops: Mapping[str, SparseOp] = field(repr=False)
    exponents: Mapping[str, tuple[Fraction, ...]] = field(repr=False)
    kind: str = "oscillators"
    closed: bool = False


def _check_params(n: int, p, L: int, backend, kind: str) -> Fraction:
    if n < 1:
        raise BuildError(f"rank n must be >= 1, got {n}")
    if L < 1:
        raise BuildError(f"truncation L must be >= 1, got {L}")
    try:
        p = to_fraction(p)
    except (ValueError, ZeroDivisionError) as exc:
        raise BuildError(f"cannot parse p={p!r}") from exc
    if backend.exact and p.denominator != 1:
        raise BuildError("exact backend requires integer p")
    if kind != "dyson" and backend.name == "exact-laurent":
        raise BuildError("the Holstein-Primakoff realization needs square roots; "
                         "use the exact-radical or numeric backend")
    return p


def _ratio(backend, k) -> object:
    """``[k]/k`` with the 0/0 convention ``[0]/0 = 0``."""
    k = to_fraction(k)
    if k == 0:
        return backend.zero()
    return backend.qint(k) * backend.const(1 / k)


def _weights(n: int, p: Fraction, basis: FockBasis) -> dict[str, tuple[Fraction, ...]]:
    ex = {}
    ex["h1"] = tuple(p - sum(s) - s[0] for s in basis.states)
    for i in range(2, n + 1):
        ex[f"h{i}"] = tuple(Fraction(s[i - 2] - s[i - 1]) for s in basis.states)
    return ex


def _cartan_ops(basis, backend, exponents) -> dict[str, SparseOp]:
    ops = {}
    for label, ev in exponents.items():
        i = label[1:]
        ops[label] = SparseOp.diagonal(basis, [backend.const(x) for x in ev])
        ops[f"qh{i}"] = SparseOp.diagonal(basis, [backend.qpow(x) for x in ev])
        ops[f"qhbar{i}"] = SparseOp.diagonal(basis, [backend.qpow(-x) for x in ev])
    return ops


def _guarded(fn: Callable, where: str) -> Callable:
    def wrapped(new: OccVector, sq: int, mono: int):
        try:
            return fn(new, sq, mono)
        except NegativeRadicandError as exc:
            raise BuildError(f"{where}: negative radicand on result state {new}: {exc}") from exc
    return wrapped


def build_dyson(n: int, p, L: int, backend) -> Realization:
    """Dyson realization: ``f_1 = a_1^+`` and polynomial-in-[.] prefactors."""
    p = _check_params(n, p, L, backend, "dyson")
    basis = enumerate_basis(n, L)
    ex = _weights(n, p, basis)
    ops = _cartan_ops(basis, backend, ex)

    def e1(new, sq, mono):
        return _ratio(backend, new[0] + 1) * backend.qint(p - sum(new)) * backend.bose(sq, mono)

    ops["e1"] = cao_op(basis, backend, [(0, -1)], e1)
    ops["f1"] = cao_op(basis, backend, [(0, +1)])
    for i in range(2, n + 1):
        cur, prev = i - 1, i - 2

        def ei(new, sq, mono, cur=cur):
            return _ratio(backend, new[cur] + 1) * backend.bose(sq, mono)

        def fi(new, sq, mono, prev=prev):
            return _ratio(backend, new[prev] + 1) * backend.bose(sq, mono)

        ops[f"e{i}"] = cao_op(basis, backend, [(cur, -1), (prev, +1)], ei)
        ops[f"f{i}"] = cao_op(basis, backend, [(cur, +1), (prev, -1)], fi)
    return Realization(n, p, L, backend, "dyson", basis, MappingProxyType(ops), MappingProxyType(ex))


def _hp_sqrt(backend, qints, rational_num, rational_den):
    if rational_den == 0:
        return backend.zero()
    return backend.sqrt_qprod(qints, Fraction(rational_num, rational_den))


def build_hp(n: int, p, L: int, backend) -> Realization:
    """Holstein-Primakoff realization with square-root prefactors.

    Each entry is a single square root of (prefactor * squared Bose factor).
    """
    p = _check_params(n, p, L, backend, "hp")
    basis = enumerate_basis(n, L)
    ex = _weights(n, p, basis)
    ops = _cartan_ops(basis, backend, ex)

    def e1(new, sq, mono):
        return _hp_sqrt(backend, [new[0] + 1, p - sum(new)], sq, new[0] + 1)

    def f1(new, sq, mono):
        return _hp_sqrt(backend, [new[0], p - sum(new) + 1], sq, new[0])

    ops["e1"] = cao_op(basis, backend, [(0, -1)], _guarded(e1, "e1"))
    ops["f1"] = cao_op(basis, backend, [(0, +1)], _guarded(f1, "f1"))
    for i in range(2, n + 1):
        cur, prev = i - 1, i - 2

        def ei(new, sq, mono, cur=cur, prev=prev):
            return _hp_sqrt(backend, [new[prev], new[cur] + 1], sq, new[prev] * (new[cur] + 1))

        def fi(new, sq, mono, cur=cur, prev=prev):
            return _hp_sqrt(backend, [new[prev] + 1, new[cur]], sq, (new[prev] + 1) * new[cur])

        ops[f"e{i}"] = cao_op(basis, backend, [(cur, -1), (prev, +1)], _guarded(ei, f"e{i}"))
        ops[f"f{i}"] = cao_op(basis, backend, [(cur, +1), (prev, -1)], _guarded(fi, f"f{i}"))
    return Realization(n, p, L, backend, "hp", basis, MappingProxyType(ops), MappingProxyType(ex))


def build_deformed_oscillators(n: int, L: int, backend) -> DeformedOscillators:
    """``a~_i^- = sqrt([N_i+1]/(N_i+1)) a_i^-``, ``a~_i^+ = sqrt([N_i]/N_i) a_i^+``, ``N~_i = N_i``."""
    if n < 1 or L < 1:
        raise BuildError("deformed oscillators need n >= 1 and L >= 1")
    if backend.name == "exact-laurent":
        raise BuildError("deformed oscillators need square roots; use exact-radical or numeric")
    basis = enumerate_basis(n, L)
    ops, ex = {}, {}
    for i in range(1, n + 1):
        m = i - 1

        def lower(new, sq, mono, m=m):
            return _hp_sqrt(backend, [new[m] + 1], sq, new[m] + 1)

        def upper(new, sq, mono, m=m):
            return _hp_sqrt(backend, [new[m]], sq, new[m])

        ops[f"atilde{i}m"] = cao_op(basis, backend, [(m, -1)], lower)
        ops[f"atilde{i}p"] = cao_op(basis, backend, [(m, +1)], upper)
        ex[f"Ntilde{i}"] = tuple(Fraction(s[m]) for s in basis.states)
        ops[f"Ntilde{i}"] = SparseOp.diagonal(basis, [backend.const(x) for x in ex[f"Ntilde{i}"]])
    return DeformedOscillators(n, L, backend, basis, MappingProxyType(ops), MappingProxyType(ex))


def build_hp_deformed(n: int, p, L: int, backend) -> Realization:
    """HP realization assembled from deformed-oscillator matrices.

    The products are formed on a basis one degree larger and then cut back
    to degree ``L``, so a creation operator acting on a top-degree state is
    not lost in the middle of a product.
    """
    p = _check_params(n, p, L, backend, "hp-deformed")
    basis = enumerate_basis(n, L)
    osc = build_deformed_oscillators(n, L + 1, backend)
    big = osc.basis
    ex = _weights(n, p, basis)
    ops = _cartan_ops(basis, backend, ex)

    def sqrt_bracket(offset, top):
        # rows above ``top`` are never reached from a column of degree <= L
        def f(s):
            if sum(s) > top:
                return backend.zero()
            try:
                return backend.sqrt_qprod([p - sum(s) + offset])
            except NegativeRadicandError as exc:
                raise BuildError(f"negative radicand [p - N + {offset}] on state {s}") from exc
        return diag_fn(big, f)

    a = osc.ops
    ops["e1"] = compose(sqrt_bracket(0, L - 1), a["atilde1m"]).restrict(basis)
    ops["f1"] = compose(sqrt_bracket(1, L), a["atilde1p"]).restrict(basis)
    for i in range(2, n + 1):
        ops[f"e{i}"] = compose(a[f"atilde{i}m"], a[f"atilde{i - 1}p"]).restrict(basis)
        ops[f"f{i}"] = compose(a[f"atilde{i}p"], a[f"atilde{i - 1}m"]).restrict(basis)
    for label, op in ops.items():
        op.lossy = bool(op.shift and op.shift > 0)
    return Realization(n, p, L, backend, "hp-deformed", basis, MappingProxyType(ops),
                       MappingProxyType(ex))


def build(kind: str, n: int, p, L: int, backend) -> Realization:
    if kind == "dyson":
        return build_dyson(n, p, L, backend)
    if kind == "hp":
        return build_hp(n, p, L, backend)
    if kind == "hp-deformed":
        return build_hp_deformed(n, p, L, backend)
    raise BuildError(f"unknown realization kind {kind!r}")


def gl_extend(r: Realization) -> Realization:
    """Add the central element ``I`` represented by ``p`` times the identity."""
    ops = dict(r.ops)
    ex = dict(r.exponents)
    ops["I"] = SparseOp.identity(r.basis, r.backend.const(r.p))
    ex["I"] = tuple(r.p for _ in r.basis.states)
    return replace(r, ops=MappingProxyType(ops), exponents=MappingProxyType(ex))
