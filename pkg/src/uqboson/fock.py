"""Truncated bosonic Fock space and sparse operators on it."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb
from typing import Callable, Iterator, Mapping, Sequence

OccVector = tuple[int, ...]


class BasisMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class FockBasis:
    """All occupation vectors of ``n`` modes with total degree ``<= L``.

    States are ordered by degree, then lexicographically (descending, so
    ``(1, 0)`` precedes ``(0, 1)``), which makes every degree band a
    contiguous index range.
    """

    n: int
    L: int
    states: tuple[OccVector, ...] = field(repr=False)
    index: Mapping[OccVector, int] = field(repr=False, compare=False)

    def degree(self, i: int) -> int:
        return sum(self.states[i])

    def degrees(self) -> list[int]:
        return [sum(s) for s in self.states]

    def band(self, lo: int, hi: int) -> range:
        """Index range of states with ``lo <= degree <= hi``."""
        lo = max(lo, 0)
        hi = min(hi, self.L)
        if hi < lo:
            return range(0)
        start = comb(self.n + lo - 1, self.n) if lo > 0 else 0
        stop = comb(self.n + hi, self.n)
        return range(start, stop)

    def __len__(self):
        return len(self.states)

    def __iter__(self) -> Iterator[OccVector]:
        return iter(self.states)


def _compositions(n: int, d: int) -> Iterator[OccVector]:
    if n == 1:
        yield (d,)
        return
    for first in range(d, -1, -1):
        for rest in _compositions(n - 1, d - first):
            yield (first,) + rest


def enumerate_basis(n: int, L: int) -> FockBasis:
    if n < 1:
        raise ValueError(f"number of modes must be positive, got {n}")
    if L < 0:
        raise ValueError(f"truncation level must be nonnegative, got {L}")
    states = tuple(itertools.chain.from_iterable(_compositions(n, d) for d in range(L + 1)))
    return FockBasis(n, L, states, {s: i for i, s in enumerate(states)})


class SparseOp:
    """Sparse operator stored column-major: ``cols[j] = {i: value}``.

    ``shift`` is the change of total degree when the operator is homogeneous
    and ``None`` when it is mixed.  ``lossy`` marks operators whose action
    was cut off at the truncation boundary.
    """

    __slots__ = ("basis", "cols", "shift", "lossy")

    def __init__(self, basis: FockBasis, cols: Mapping[int, Mapping[int, object]] | None = None,
                 shift: int | None = 0, lossy: bool = False):
        self.basis = basis
        self.cols = {j: {i: v for i, v in col.items() if v} for j, col in (cols or {}).items()}
        self.cols = {j: col for j, col in self.cols.items() if col}
        self.shift = shift
        self.lossy = lossy

    # construction helpers
    @classmethod
    def diagonal(cls, basis: FockBasis, values: Sequence) -> SparseOp:
        return cls(basis, {j: {j: v} for j, v in enumerate(values)}, 0)

    @classmethod
    def identity(cls, basis: FockBasis, one) -> SparseOp:
        return cls.diagonal(basis, [one] * len(basis))

    def _check(self, other: SparseOp):
        if self.basis != other.basis:
            raise BasisMismatchError("operators live on different Fock bases")

    def _join_shift(self, other: SparseOp) -> int | None:
        if not self.cols:
            return other.shift
        if not other.cols:
            return self.shift
        return self.shift if self.shift == other.shift else None

    def __add__(self, other: SparseOp) -> SparseOp:
        self._check(other)
        cols = {j: dict(col) for j, col in self.cols.items()}
        for j, col in other.cols.items():
            tgt = cols.setdefault(j, {})
            for i, v in col.items():
                tgt[i] = tgt[i] + v if i in tgt else v
        return SparseOp(self.basis, cols, self._join_shift(other), self.lossy or other.lossy)

    def __neg__(self) -> SparseOp:
        return self.scale(-1)

    def __sub__(self, other: SparseOp) -> SparseOp:
        return self + (-other)

    def scale(self, x) -> SparseOp:
        cols = {j: {i: x * v for i, v in col.items()} for j, col in self.cols.items()}
        return SparseOp(self.basis, cols, self.shift, self.lossy)

    def __matmul__(self, other: SparseOp) -> SparseOp:
        return compose(self, other)

    # inspection
    def entry(self, i: int, j: int, zero=0):
        return self.cols.get(j, {}).get(i, zero)

    def entries(self) -> Iterator[tuple[int, int, object]]:
        for j in sorted(self.cols):
            col = self.cols[j]
            for i in sorted(col):
                yield i, j, col[i]

    def nnz(self) -> int:
        return sum(len(c) for c in self.cols.values())

    def is_diagonal(self) -> bool:
        return all(set(col) <= {j} for j, col in self.cols.items())

    def diagonal_values(self, zero=0) -> list:
        return [self.entry(j, j, zero) for j in range(len(self.basis))]

    def apply(self, j: int) -> dict[int, object]:
        """Image of basis vector ``j`` as ``{row: coefficient}``."""
        return dict(self.cols.get(j, {}))

    def transpose(self) -> SparseOp:
        cols: dict[int, dict[int, object]] = {}
        for i, j, v in self.entries():
            cols.setdefault(i, {})[j] = v
        return SparseOp(self.basis, cols, None if self.shift is None else -self.shift, self.lossy)

    def map(self, fn: Callable) -> SparseOp:
        cols = {j: {i: fn(v) for i, v in col.items()} for j, col in self.cols.items()}
        return SparseOp(self.basis, cols, self.shift, self.lossy)

    def restrict(self, basis: FockBasis) -> SparseOp:
        """Keep rows and columns of states that belong to the smaller ``basis``."""
        cols = {}
        for i, j, v in self.entries():
            si, sj = self.basis.states[i], self.basis.states[j]
            if si in basis.index and sj in basis.index:
                cols.setdefault(basis.index[sj], {})[basis.index[si]] = v
        return SparseOp(basis, cols, self.shift, self.lossy)

    def to_dense(self, zero=0) -> list[list]:
        size = len(self.basis)
        out = [[zero] * size for _ in range(size)]
        for i, j, v in self.entries():
            out[i][j] = v
        return out

    def __repr__(self):
        return f"SparseOp(dim={len(self.basis)}, nnz={self.nnz()}, shift={self.shift})"


def compose(a: SparseOp, b: SparseOp) -> SparseOp:
    """Product ``a @ b`` (``b`` acts first)."""
    a._check(b)
    cols: dict[int, dict[int, object]] = {}
    for j, bcol in b.cols.items():
        out: dict[int, object] = {}
        for k, bv in bcol.items():
            acol = a.cols.get(k)
            if not acol:
                continue
            for i, av in acol.items():
                t = av * bv
                out[i] = out[i] + t if i in out else t
        if out:
            cols[j] = out
    shift = None if a.shift is None or b.shift is None else a.shift + b.shift
    return SparseOp(a.basis, cols, shift, a.lossy or b.lossy)


def q_commutator(a: SparseOp, b: SparseOp, x=1) -> SparseOp:
    """``[a, b]_x = a b - x b a``."""
    return compose(a, b) - compose(b, a).scale(x)


def commutator(a: SparseOp, b: SparseOp) -> SparseOp:
    return q_commutator(a, b, 1)


# --------------------------------------------------------------------------
# creation / annihilation


def cao_action(state: OccVector, caos: Sequence[tuple[int, int]]):
    """Act with a string of creation/annihilation operators on ``|state>``.

    ``caos`` lists ``(mode, sign)`` pairs in written order (0-based modes,
    ``+1`` creation, ``-1`` annihilation); the rightmost acts first.  Returns
    ``(new_state, squared_factor, monomial_factor)`` or ``None`` when the
    result vanishes.  ``squared_factor`` is the square of the orthonormal
    matrix element; ``monomial_factor`` is the element in the monomial basis.
    """
    l = list(state)
    sq = 1
    mono = 1
    for mode, sign in reversed(caos):
        if sign > 0:
            l[mode] += 1
            sq *= l[mode]
        else:
            if l[mode] == 0:
                return None
            sq *= l[mode]
            mono *= l[mode]
            l[mode] -= 1
    return tuple(l), sq, mono


def cao_op(basis: FockBasis, backend, caos: Sequence[tuple[int, int]],
           coeff: Callable[[OccVector], object] | None = None) -> SparseOp:
    """Matrix of ``f(N) * (CAO string)`` computed state by state.

    ``coeff`` is a left-placed function of the number operators, so it is
    evaluated on the state produced by the CAO string.  When ``coeff`` is
    given it must return the full entry including the Bose factor; it
    receives ``(new_state, squared_factor, monomial_factor)``.
    """
    shift = sum(s for _, s in caos)
    cols: dict[int, dict[int, object]] = {}
    lossy = False
    for j, st in enumerate(basis.states):
        res = cao_action(st, caos)
        if res is None:
            continue
        new, sq, mono = res
        i = basis.index.get(new)
        if i is None:
            lossy = True
            continue
        v = coeff(new, sq, mono) if coeff is not None else backend.bose(sq, mono)
        if v:
            cols[j] = {i: v}
    return SparseOp(basis, cols, shift, lossy)


def _mode(basis: FockBasis, i: int) -> int:
    if not 1 <= i <= basis.n:
        raise IndexError(f"mode index {i} out of range 1..{basis.n}")
    return i - 1


def raise_op(basis: FockBasis, backend, i: int) -> SparseOp:
    """``a_i^+``; top-degree states are sent to zero (``lossy`` is set)."""
    return cao_op(basis, backend, [(_mode(basis, i), +1)])


def lower_op(basis: FockBasis, backend, i: int) -> SparseOp:
    return cao_op(basis, backend, [(_mode(basis, i), -1)])


def number_op(basis: FockBasis, backend, i: int) -> SparseOp:
    m = _mode(basis, i)
    return SparseOp.diagonal(basis, [backend.const(s[m]) for s in basis.states])


def total_number(basis: FockBasis, backend) -> SparseOp:
    return SparseOp.diagonal(basis, [backend.const(sum(s)) for s in basis.states])


def diag_fn(basis: FockBasis, f: Callable[[OccVector], object]) -> SparseOp:
    """Diagonal operator ``f(N_1, ..., N_n)``."""
    return SparseOp.diagonal(basis, [f(s) for s in basis.states])
