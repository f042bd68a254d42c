"""Representation-level checks: weights, invariant subspaces, unitarity,
an irreducibility probe, and the classical q -> 1 limit."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from fractions import Fraction
from math import comb

from .fock import SparseOp, compose, diag_fn, enumerate_basis, lower_op, raise_op
from .qscalar import QLaurent, QRadical, make_backend
from .realization import Realization, build

UNITARITY_TOL = Fraction(1, 10**30)
EXPECT_FAIL_MIN = Fraction(1, 10**3)
PROBE_TOL = Fraction(1, 10**20)


class InsufficientTruncation(ValueError):
    pass


def _as_fraction(x) -> Fraction:
    if isinstance(x, QRadical):
        if not x.is_laurent():
            raise ValueError(f"{x} is not rational")
        x = x.laurent_part()
    if isinstance(x, QLaurent):
        if not x.is_constant():
            raise ValueError(f"{x} is not a constant")
        return x.constant()
    return Fraction(x)


def weights(r: Realization) -> list[tuple[tuple[int, ...], tuple]]:
    """``(state, (h_1, ..., h_n) eigenvalues)`` for every basis state."""
    be = r.backend
    for i in range(1, r.n + 1):
        op = r.ops[f"h{i}"]
        if not op.is_diagonal():
            raise ValueError(f"h{i} image is not diagonal")
        expected = r.exponents[f"h{i}"]
        for j, v in enumerate(op.diagonal_values(be.zero())):
            if not be.is_zero(v - be.const(expected[j])).zero:
                raise ValueError(f"h{i} diagonal disagrees with its weight on state {r.basis.states[j]}")
    return [(s, tuple(r.exponents[f"h{i}"][j] for i in range(1, r.n + 1)))
            for j, s in enumerate(r.basis.states)]


def f0_dimension(n: int, p: int) -> int:
    return comb(n + p, n)


# --- invariant subspaces --------------------------------------------------


@dataclass
class InvarianceReport:
    subspace: str  # "F0" | "F1"
    p: int
    checked_degrees: tuple[int, int]
    verdicts: dict[str, bool] = field(default_factory=dict)
    witnesses: dict[str, dict] = field(default_factory=dict)

    @property
    def invariant(self) -> bool:
        return all(self.verdicts.values())

    def to_json(self) -> dict:
        d = asdict(self)
        d["checked_degrees"] = list(self.checked_degrees)
        d["invariant"] = self.invariant
        return d


def invariance_check(r: Realization, subspace: str) -> InvarianceReport:
    """Does every generator map ``F0`` (degree <= p) or ``F1`` (degree > p) into itself?

    ``F1`` columns are checked up to degree ``L - 1`` so that raising
    operators are never cut off by the truncation.
    """
    if not r.p_is_natural:
        raise ValueError("invariant subspaces F0/F1 are defined for natural p")
    p = int(r.p)
    if r.L < p + 2:
        raise InsufficientTruncation(f"need L >= p + 2 = {p + 2} to see the boundary, got L = {r.L}")
    if subspace == "F0":
        lo, hi = 0, p
    elif subspace == "F1":
        lo, hi = p + 1, r.L - 1
    else:
        raise ValueError(f"unknown subspace {subspace!r}")
    inside = (lambda d: d <= p) if subspace == "F0" else (lambda d: d > p)
    rep = InvarianceReport(subspace, p, (lo, hi))
    be = r.backend
    for label in r.generators():
        op = r.ops[label]
        rep.verdicts[label] = True
        for j in r.basis.band(lo, hi):
            for i, v in sorted(op.cols.get(j, {}).items()):
                if inside(r.basis.degree(i)) or be.is_zero(v).zero:
                    continue
                rep.verdicts[label] = False
                rep.witnesses[label] = {"col_state": list(r.basis.states[j]),
                                        "row_state": list(r.basis.states[i]),
                                        "entry": be.to_json(v), "entry_text": str(v)}
                break
            if not rep.verdicts[label]:
                break
    return rep


def block_offdiagonal(r: Realization) -> dict[str, int]:
    """Number of nonzero entries coupling ``F0`` and ``F1``, per generator.

    Only columns of degree ``<= L - 1`` are inspected.
    """
    p = int(r.p)
    out = {}
    for label in r.generators():
        count = 0
        for i, j, v in r.ops[label].entries():
            if r.basis.degree(j) > r.L - 1:
                continue
            if (r.basis.degree(i) <= p) != (r.basis.degree(j) <= p) and not r.backend.is_zero(v).zero:
                count += 1
        out[label] = count
    return out


# --- unitarity ------------------------------------------------------------


@dataclass
class UnitarityReport:
    kind: str
    expect_fail: bool
    max_deviation: str
    deviations: dict[str, str]
    witness: dict | None
    passed: bool

    def to_json(self) -> dict:
        return asdict(self)


def unitarity_check(r: Realization, expect_fail: bool = False) -> UnitarityReport:
    """Compare ``pi(e_i)^dagger`` with ``pi(f_i)`` and ``pi(h_i)^dagger`` with ``pi(h_i)`` on F0.

    The scalar product is antilinear in its first argument.  For a Dyson
    build the check only runs with ``expect_fail=True`` and passes when a
    deviation of at least ``1e-3`` is found.
    """
    be = r.backend
    if be.exact:
        raise ValueError("unitarity check runs on the numeric backend")
    if be.qvalue <= 0:
        raise ValueError("unitarity needs q > 0")
    if not r.p_is_natural:
        raise ValueError("unitarity is checked on F0, which needs natural p")
    if r.kind == "dyson" and not expect_fail:
        raise ValueError("the Dyson realization is not unitarizable; run it with expect_fail=True")
    p = int(r.p)
    if r.L < p:
        raise InsufficientTruncation(f"F0 needs L >= p = {p}")
    ctx = be.ctx
    idx = list(r.basis.band(0, p))
    pairs = [(f"e{i}", f"f{i}") for i in range(1, r.n + 1)] + [(f"h{i}", f"h{i}") for i in range(1, r.n + 1)]
    zero = be.zero()
    deviations = {}
    worst = ctx.mpf(0)
    witness = None
    threshold = ctx.mpf(EXPECT_FAIL_MIN.numerator) / EXPECT_FAIL_MIN.denominator
    for a, b in pairs:
        A, B = r.ops[a], r.ops[b]
        dev = ctx.mpf(0)
        for j in idx:
            for i in idx:
                d = abs(ctx.conj(A.entry(i, j, zero)) - B.entry(j, i, zero))
                if d > dev:
                    dev = d
                if witness is None and d >= threshold:
                    witness = {"pair": [a, b], "state_l": list(r.basis.states[j]),
                               "state_lprime": list(r.basis.states[i]),
                               f"{a}_entry": ctx.nstr(A.entry(i, j, zero), 20),
                               f"{b}_entry": ctx.nstr(B.entry(j, i, zero), 20)}
        deviations[a] = ctx.nstr(dev, 5)
        worst = max(worst, dev)
    tol = ctx.mpf(UNITARITY_TOL.numerator) / UNITARITY_TOL.denominator
    passed = bool(worst >= threshold) if expect_fail else bool(worst < tol)
    return UnitarityReport(r.kind, expect_fail, ctx.nstr(worst, 5), deviations, witness, passed)


# --- irreducibility probe -------------------------------------------------


@dataclass
class ProbeReport:
    p: str
    q: str
    coefficients: list[tuple[int, str]]
    shifted: list[tuple[int, str]]
    connected: bool
    passed: bool
    note: str = "finite-truncation probe of the mechanism, not a proof of irreducibility"

    def to_json(self) -> dict:
        return asdict(self)


def irreducibility_probe(r: Realization) -> ProbeReport:
    """Check that no graded cut decouples when ``p`` is not an integer.

    Every ``[p - d]`` and ``[p - d + 1]`` for ``d = 0..L`` must be nonzero,
    and ``f_1`` (``e_1``) must connect each degree ``d`` to ``d + 1``
    (``d + 1`` to ``d``) for ``d < L``.  ``q = 1`` is allowed and probes the
    classical coefficients ``p - d``.
    """
    be = r.backend
    if be.exact:
        raise ValueError("the irreducibility probe runs on the numeric backend")
    if r.p.denominator == 1:
        raise ValueError("the irreducibility probe needs non-integer p")
    ctx = be.ctx
    tol = ctx.mpf(PROBE_TOL.numerator) / PROBE_TOL.denominator
    coeffs = [(d, be.qint(r.p - d)) for d in range(r.L + 1)]
    shifted = [(d, be.qint(r.p - d + 1)) for d in range(r.L + 1)]
    nonzero = all(abs(v) > tol for _, v in coeffs + shifted)

    def links(op, src_shift):
        hit = set()
        for i, j, v in op.entries():
            if abs(v) > tol:
                hit.add(r.basis.degree(j) + min(src_shift, 0))
        return hit

    ups = links(r.ops["f1"], +1)
    downs = links(r.ops["e1"], -1)
    connected = all(d in ups and d in downs for d in range(r.L))
    return ProbeReport(str(r.p), str(be.qvalue), [(d, ctx.nstr(v, 15)) for d, v in coeffs],
                       [(d, ctx.nstr(v, 15)) for d, v in shifted], connected, nonzero and connected)


# --- classical limit ------------------------------------------------------


def classical_realization(kind: str, n: int, p, L: int, backend) -> dict[str, SparseOp]:
    """Classical sl(n+1) boson realization built from bare boson matrices.

    Products are formed on a basis one degree larger and cut back to ``L``.
    """
    p = Fraction(p)
    basis = enumerate_basis(n, L)
    big = enumerate_basis(n, L + 1)
    a_p = {i: raise_op(big, backend, i) for i in range(1, n + 1)}
    a_m = {i: lower_op(big, backend, i) for i in range(1, n + 1)}

    if kind == "dyson":
        e1_pref = diag_fn(big, lambda s: backend.const(p - sum(s)))
        f1_pref = None
    else:
        def root(offset):
            return diag_fn(big, lambda s: backend.zero() if p - sum(s) + offset < 0
                           else QRadical.sqrt((), p - sum(s) + offset))
        e1_pref, f1_pref = root(0), root(1)

    ops = {
        "h1": diag_fn(basis, lambda s: backend.const(p - sum(s) - s[0])),
        "e1": compose(e1_pref, a_m[1]).restrict(basis),
        "f1": (a_p[1] if f1_pref is None else compose(f1_pref, a_p[1])).restrict(basis),
    }
    for i in range(2, n + 1):
        ops[f"h{i}"] = diag_fn(basis, lambda s, i=i: backend.const(s[i - 2] - s[i - 1]))
        ops[f"e{i}"] = compose(a_m[i], a_p[i - 1]).restrict(basis)
        ops[f"f{i}"] = compose(a_p[i], a_m[i - 1]).restrict(basis)
    return ops


@dataclass
class LimitReport:
    kind: str
    n: int
    p: int
    L: int
    labels: list[str]
    passed: bool
    mismatch: dict | None = None

    def to_json(self) -> dict:
        return asdict(self)


def classical_limit(r: Realization) -> LimitReport:
    """Evaluate an exact build at ``q = 1`` and compare with :func:`classical_realization`."""
    be = r.backend
    if not be.exact:
        raise ValueError("the classical limit needs an exact backend")
    kind = "dyson" if r.kind == "dyson" else "hp"
    classical = classical_realization(kind, r.n, r.p, r.L, be)
    labels = r.generators()
    for label in labels:
        got = r.ops[label].map(be.at_one)
        want = classical[label]
        cells = set((i, j) for i, j, _ in got.entries()) | set((i, j) for i, j, _ in want.entries())
        for i, j in sorted(cells, key=lambda c: (c[1], c[0])):
            a, b = got.entry(i, j, be.zero()), want.entry(i, j, be.zero())
            if a != b:
                return LimitReport(r.kind, r.n, int(r.p), r.L, labels, False,
                                   {"label": label, "row_state": list(r.basis.states[i]),
                                    "col_state": list(r.basis.states[j]),
                                    "at_q_1": str(a), "classical": str(b)})
    return LimitReport(r.kind, r.n, int(r.p), r.L, labels, True)


def limit_truncation(kind: str, p: int, L: int) -> int:
    """Largest usable truncation for an exact build: HP stops at ``p + 1``
    because deeper states need square roots of negative q-numbers."""
    return L if kind == "dyson" else min(L, p + 1)


def classical_limit_for(kind: str, n: int, p, L: int) -> LimitReport:
    p = Fraction(p)
    backend = make_backend("exact-laurent" if kind == "dyson" else "exact-radical")
    r = build(kind, n, p, limit_truncation(kind, int(p), L), backend)
    return classical_limit(r)
