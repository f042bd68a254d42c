"""Scalar arithmetic for q-deformed coefficients.

Three kinds of scalars are used by the operator code:

* :class:`QLaurent` -- Laurent polynomials in ``q`` with rational coefficients.
* :class:`QRadical` -- finite sums ``coeff * sqrt(r * [k1][k2]...)`` where
  ``coeff`` is a :class:`QLaurent`, ``r`` a positive rational and ``[k]``
  q-integers.
* numeric values -- ``mpmath`` numbers living in a private context with at
  least 50 significant digits, evaluated at one fixed real ``q > 0``.

Each kind is wrapped by a backend object (:class:`LaurentBackend`,
:class:`RadicalBackend`, :class:`NumericBackend`) that the operator builders
talk to, so the builders never branch on scalar type.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from mpmath import MPContext

DEFAULT_DPS = 50
EXACT_TOL = Fraction(1, 10**30)
NUMERIC_TOL = Fraction(1, 10**10)

# fixed q sample set for "zero (sampled)" verdicts
SAMPLE_QS: tuple[str, ...] = ("1/2", "7/10", "9/10", "11/10", "3/2", "2", "5/2", "exp(1/10)")


class NegativeRadicandError(ValueError):
    """Square root of a quantity that is negative for q > 0."""


def make_context(dps: int | None = None) -> MPContext:
    if dps is None:
        dps = int(os.environ.get("QREAL_PRECISION", DEFAULT_DPS))
    if dps < DEFAULT_DPS:
        raise ValueError(f"numeric precision must be >= {DEFAULT_DPS} digits, got {dps}")
    ctx = MPContext()
    ctx.dps = dps
    return ctx


_SAMPLE_CTX = make_context(DEFAULT_DPS)


def sample_points(ctx: MPContext = _SAMPLE_CTX) -> list:
    pts = []
    for s in SAMPLE_QS:
        if s.startswith("exp("):
            pts.append(ctx.exp(_as_mpf(ctx, Fraction(s[4:-1]))))
        else:
            pts.append(_as_mpf(ctx, Fraction(s)))
    return pts


def to_fraction(x) -> Fraction:
    """Parse ints, Fractions, and decimal or ``a/b`` strings exactly."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(str(x).strip())


# --------------------------------------------------------------------------
# Laurent polynomials


class QLaurent:
    """Immutable Laurent polynomial ``sum c_k q^k`` with ``Fraction`` coefficients."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[int, object] | None = None):
        clean = {}
        if terms:
            for k, c in terms.items():
                c = to_fraction(c)
                if c:
                    clean[int(k)] = c
        self._terms = clean
        self._hash = None

    @classmethod
    def const(cls, c) -> QLaurent:
        return cls({0: c})

    @classmethod
    def monomial(cls, k: int, c=1) -> QLaurent:
        return cls({k: c})

    @property
    def terms(self) -> dict[int, Fraction]:
        return dict(self._terms)

    def _coerce(self, other):
        if isinstance(other, QLaurent):
            return other
        if isinstance(other, (int, Fraction)):
            return QLaurent.const(other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out.get(k, 0) + c
        return QLaurent(out)

    __radd__ = __add__

    def __neg__(self):
        return QLaurent({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out: dict[int, Fraction] = {}
        for k1, c1 in self._terms.items():
            for k2, c2 in other._terms.items():
                out[k1 + k2] = out.get(k1 + k2, 0) + c1 * c2
        return QLaurent(out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            if len(self._terms) != 1:
                raise ValueError("only monomials have Laurent inverses")
            ((k, c),) = self._terms.items()
            return QLaurent({-k * -e: Fraction(1) / c ** -e})
        out = QLaurent.const(1)
        for _ in range(e):
            out = out * self
        return out

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return QLaurent({k: c / other for k, c in self._terms.items()})
        if isinstance(other, QLaurent):
            return self.divexact(other)
        return NotImplemented

    def divexact(self, d: QLaurent) -> QLaurent:
        """Exact division; raises ``ValueError`` when ``d`` does not divide ``self``."""
        if not d:
            raise ZeroDivisionError("division by zero Laurent polynomial")
        rem = dict(self._terms)
        if not rem:
            return QLaurent()
        dlo, dhi = min(d._terms), max(d._terms)
        floor = min(rem) - dlo
        lead = d._terms[dhi]
        quot: dict[int, Fraction] = {}
        while rem:
            k = max(rem) - dhi
            if k < floor:
                break
            top = k + dhi
            c = rem[top] / lead
            quot[k] = c
            for dk, dc in d._terms.items():
                v = rem.get(k + dk, 0) - c * dc
                if v:
                    rem[k + dk] = v
                else:
                    rem.pop(k + dk, None)
        if rem:
            raise ValueError(f"{d} does not divide {self}")
        return QLaurent(quot)

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def is_constant(self) -> bool:
        return all(k == 0 for k in self._terms)

    def constant(self) -> Fraction:
        return self._terms.get(0, Fraction(0))

    def bar(self) -> QLaurent:
        """Substitute ``q -> 1/q``."""
        return QLaurent({-k: c for k, c in self._terms.items()})

    def evaluate(self, q):
        """Value at ``q``: exact for int/Fraction ``q``, else an mpmath number."""
        if isinstance(q, (int, Fraction)):
            q = Fraction(q)
            return sum((c * q**k for k, c in self._terms.items()), Fraction(0))
        ctx = q.context
        total = ctx.mpf(0)
        for k, c in self._terms.items():
            total += ctx.power(q, k) * c.numerator / c.denominator
        return total

    def at_one(self) -> QLaurent:
        return QLaurent.const(sum(self._terms.values(), Fraction(0)))

    def __repr__(self):
        return f"QLaurent({self})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for k in sorted(self._terms, reverse=True):
            c = self._terms[k]
            mono = "" if k == 0 else ("q" if k == 1 else f"q^{k}")
            if mono and abs(c) == 1:
                coef = "-" if c < 0 else ""
                parts.append(coef + mono)
            else:
                parts.append(f"{c}{'*' + mono if mono else ''}")
        return " + ".join(parts).replace("+ -", "- ")

    def to_json(self):
        return {"laurent": {str(k): _frac_str(c) for k, c in sorted(self._terms.items())}}

    @classmethod
    def from_json(cls, obj) -> QLaurent:
        return cls({int(k): Fraction(v) for k, v in obj["laurent"].items()})


def _frac_str(c: Fraction) -> str:
    return f"{c.numerator}/{c.denominator}"


Q = QLaurent.monomial(1)
QBAR = QLaurent.monomial(-1)


def qint(k: int) -> QLaurent:
    """The q-integer ``[k] = (q^k - q^-k)/(q - q^-1)`` as a Laurent polynomial."""
    k = int(k)
    if k == 0:
        return QLaurent()
    if k < 0:
        return -qint(-k)
    return QLaurent({e: 1 for e in range(-(k - 1), k, 2)})


def qnum_eval(x, q, ctx: MPContext | None = None):
    """Numeric q-number ``(q^x - q^-x)/(q - q^-1)`` at real ``q > 0``.

    ``q == 1`` returns the classical limit ``x``.
    """
    ctx = ctx or _SAMPLE_CTX
    q = _as_mpf(ctx, q)
    x = _as_mpf(ctx, x)
    if q <= 0:
        raise ValueError("q must be positive")
    if q == 1:
        return x
    return (ctx.power(q, x) - ctx.power(q, -x)) / (q - 1 / q)


def _as_mpf(ctx, x):
    if isinstance(x, Fraction):
        return ctx.mpf(x.numerator) / x.denominator
    if isinstance(x, str):
        return _as_mpf(ctx, Fraction(x))
    return ctx.mpf(x) if not isinstance(x, ctx.mpf) else x


# --------------------------------------------------------------------------
# radical extension


def _squarefree_split(m: int) -> tuple[int, int]:
    """Write ``m = s * f**2`` with ``s`` square-free; returns ``(s, f)``."""
    s, f = 1, 1
    d = 2
    while d * d <= m:
        while m % (d * d) == 0:
            m //= d * d
            f *= d
        if m % d == 0:
            m //= d
            s *= d
        d += 1
    return s * m, f


def _normalize_term(coeff: QLaurent, radicand: Iterable[int], rational: Fraction):
    """Return ``(coeff, radicand_tuple, squarefree_int)`` or ``None`` for a zero term."""
    if not coeff or rational == 0:
        return None
    if rational < 0:
        raise NegativeRadicandError(f"negative rational radicand {rational}")
    sign = 1
    counts: dict[int, int] = {}
    for k in radicand:
        k = int(k)
        if k == 0:
            return None
        if k < 0:
            sign = -sign
            k = -k
        if k == 1:
            continue
        counts[k] = counts.get(k, 0) + 1
    if sign < 0:
        raise NegativeRadicandError(
            "radicand " + " ".join(f"[{k}]" for k in radicand) + " is negative for q > 0"
        )
    out = []
    for k in sorted(counts):
        pairs, odd = divmod(counts[k], 2)
        if pairs:
            coeff = coeff * qint(k) ** pairs
        if odd:
            out.append(k)
    # sqrt(a/b) = sqrt(a*b)/b
    num = rational.numerator * rational.denominator
    s, f = _squarefree_split(num)
    coeff = coeff * Fraction(f, rational.denominator)
    return coeff, tuple(out), s


class QRadical:
    """Immutable sum of terms ``coeff * sqrt(rad_rational * prod([k] for k in radicand))``.

    Normal form: square factors are pulled into ``coeff``, ``[1]`` is dropped,
    ``rad_rational`` is a square-free positive integer, and terms sharing a
    radical are merged.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Iterable[tuple[QLaurent, Sequence[int], object]] = ()):
        acc: dict[tuple[tuple[int, ...], int], QLaurent] = {}
        for coeff, radicand, rational in terms:
            nt = _normalize_term(coeff if isinstance(coeff, QLaurent) else QLaurent.const(coeff),
                                 radicand, to_fraction(rational))
            if nt is None:
                continue
            c, rad, s = nt
            key = (rad, s)
            acc[key] = acc[key] + c if key in acc else c
        self._terms = {k: v for k, v in acc.items() if v}
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict) -> QRadical:
        obj = cls.__new__(cls)
        obj._terms = {k: v for k, v in terms.items() if v}
        obj._hash = None
        return obj

    @classmethod
    def from_laurent(cls, x) -> QRadical:
        x = x if isinstance(x, QLaurent) else QLaurent.const(x)
        return cls._raw({((), 1): x})

    @classmethod
    def sqrt(cls, radicand: Sequence[int] = (), rational=1, coeff=1) -> QRadical:
        """``coeff * sqrt(rational * prod [k])``."""
        return cls([(coeff if isinstance(coeff, QLaurent) else QLaurent.const(coeff), radicand, rational)])

    @property
    def terms(self) -> list[tuple[QLaurent, tuple[int, ...], int]]:
        return [(c, rad, s) for (rad, s), c in sorted(self._terms.items())]

    def _coerce(self, other):
        if isinstance(other, QRadical):
            return other
        if isinstance(other, (QLaurent, int, Fraction)):
            return QRadical.from_laurent(other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out[k] + c if k in out else c
        return QRadical._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return QRadical._raw({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return radical_mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, QLaurent)):
            return QRadical._raw({k: c / other for k, c in self._terms.items()})
        return NotImplemented

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def is_laurent(self) -> bool:
        return all(k == ((), 1) for k in self._terms)

    def laurent_part(self) -> QLaurent:
        return self._terms.get(((), 1), QLaurent())

    def evaluate(self, q):
        ctx = getattr(q, "context", _SAMPLE_CTX)
        q = _as_mpf(ctx, q) if not hasattr(q, "context") else q
        total = ctx.mpf(0)
        for (rad, s), c in self._terms.items():
            r = ctx.mpf(s)
            for k in rad:
                r *= qnum_eval(k, q, ctx)
            total += c.evaluate(q) * ctx.sqrt(r)
        return total

    def at_one(self) -> QRadical:
        """Classical limit: every ``[k]`` becomes ``k`` and ``q`` becomes 1."""
        return QRadical([(c.at_one(), (), s * math.prod(rad)) for (rad, s), c in self._terms.items()])

    def __repr__(self):
        return f"QRadical({self})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for c, rad, s in self.terms:
            inner = "*".join(([str(s)] if s != 1 else []) + [f"[{k}]" for k in rad])
            parts.append(f"({c})" + (f"*sqrt({inner})" if inner else ""))
        return " + ".join(parts)

    def to_json(self):
        return [{"coeff": c.to_json(), "radicand": list(rad), "rad_rational": f"{s}/1"}
                for c, rad, s in self.terms]

    @classmethod
    def from_json(cls, obj) -> QRadical:
        return cls([(QLaurent.from_json(t["coeff"]), t["radicand"], Fraction(t["rad_rational"]))
                    for t in obj])


def radical_mul(a: QRadical, b: QRadical) -> QRadical:
    """Product in normal form (radicands merged, squares extracted)."""
    terms = []
    for (ra, sa), ca in a._terms.items():
        for (rb, sb), cb in b._terms.items():
            terms.append((ca * cb, ra + rb, sa * sb))
    return QRadical(terms)


# --------------------------------------------------------------------------
# zero tests


@dataclass(frozen=True)
class ZeroVerdict:
    zero: bool
    kind: str  # "exact" | "sampled" | "nonzero"
    samples: tuple[str, ...] = ()
    max_abs: str = "0"

    def __bool__(self):
        return self.zero


def is_zero(a, policy: str = "exact", tol=EXACT_TOL) -> ZeroVerdict:
    """Zero test for exact scalars.

    ``exact`` looks only at the normal form.  ``sampled`` additionally evaluates
    a nonzero normal form on the fixed q sample set; agreement with zero at
    every sample gives a ``"sampled"`` verdict, never an exact one.
    """
    if not a:
        return ZeroVerdict(True, "exact")
    if policy == "exact":
        return ZeroVerdict(False, "nonzero")
    if policy != "sampled":
        raise ValueError(f"unknown zero-test policy {policy!r}")
    ctx = _SAMPLE_CTX
    tol_m = ctx.mpf(tol.numerator) / tol.denominator
    worst = ctx.mpf(0)
    for q in sample_points(ctx):
        v = abs(a.evaluate(q))
        worst = max(worst, v)
    zero = worst < tol_m
    return ZeroVerdict(zero, "sampled" if zero else "nonzero", SAMPLE_QS, ctx.nstr(worst, 5))


# --------------------------------------------------------------------------
# backends


class LaurentBackend:
    """Exact Laurent-polynomial scalars.

    Square roots never occur, so operators use the monomial basis
    ``(a_1^+)^l_1 ... (a_n^+)^l_n |0>``: ``a^+`` has matrix element 1 and
    ``a^-`` has ``l``.  This is a diagonal similarity transform of the
    orthonormal convention and leaves every operator identity intact.
    """

    name = "exact-laurent"
    convention = "monomial"
    exact = True

    def zero(self):
        return QLaurent()

    def one(self):
        return QLaurent.const(1)

    def const(self, c):
        return QLaurent.const(to_fraction(c))

    def q(self):
        return Q

    def qbar(self):
        return QBAR

    def qint(self, x):
        x = to_fraction(x)
        if x.denominator != 1:
            raise ValueError("exact backends need integer q-number arguments")
        return qint(x.numerator)

    def qpow(self, x):
        x = to_fraction(x)
        if x.denominator != 1:
            raise ValueError("exact backends need integer exponents")
        return QLaurent.monomial(x.numerator)

    def bose(self, squared: int, mono: int):
        return QLaurent.const(mono)

    def sqrt_qprod(self, qints: Sequence, rational=1):
        raise ValueError("the exact-laurent backend has no square roots; use exact-radical")

    def div_q_minus_qbar(self, x):
        return x.divexact(Q - QBAR)

    def is_zero(self, x, tol=None) -> ZeroVerdict:
        return is_zero(x, "exact")

    def evaluate(self, x, q):
        return _lift(x).evaluate(q)

    def at_one(self, x):
        return _lift(x).at_one()

    def to_json(self, x):
        return _lift(x).to_json()

    def from_json(self, obj):
        return QLaurent.from_json(obj)

    def describe(self) -> dict:
        return {"backend": self.name, "convention": self.convention}


class RadicalBackend(LaurentBackend):
    """Exact scalars in the radical extension; orthonormal basis convention."""

    name = "exact-radical"
    convention = "orthonormal"

    def zero(self):
        return QRadical()

    def one(self):
        return QRadical.from_laurent(1)

    def const(self, c):
        return QRadical.from_laurent(to_fraction(c))

    def q(self):
        return QRadical.from_laurent(Q)

    def qbar(self):
        return QRadical.from_laurent(QBAR)

    def qint(self, x):
        return QRadical.from_laurent(super().qint(x))

    def qpow(self, x):
        return QRadical.from_laurent(super().qpow(x))

    def bose(self, squared: int, mono: int):
        return QRadical.sqrt((), squared)

    def sqrt_qprod(self, qints: Sequence, rational=1):
        ks = []
        for x in qints:
            x = to_fraction(x)
            if x.denominator != 1:
                raise ValueError("exact backends need integer q-number arguments")
            ks.append(x.numerator)
        return QRadical.sqrt(ks, to_fraction(rational))

    def div_q_minus_qbar(self, x):
        x = _lift_radical(x)
        return QRadical._raw({k: c.divexact(Q - QBAR) for k, c in x._terms.items()})

    def is_zero(self, x, tol=EXACT_TOL) -> ZeroVerdict:
        return is_zero(_lift_radical(x), "sampled", tol)

    def from_json(self, obj):
        return QRadical.from_json(obj)

    def to_json(self, x):
        return _lift_radical(x).to_json()


def _lift(x):
    if isinstance(x, (QLaurent, QRadical)):
        return x
    return QLaurent.const(x)


def _lift_radical(x):
    if isinstance(x, QRadical):
        return x
    return QRadical.from_laurent(x)


@dataclass(frozen=True)
class NumericBackend:
    """High-precision floating point at one fixed real ``q > 0``.

    Relative rounding error per operation is about ``10**-dps``; operator
    products of depth four keep roughly ``dps - 3`` correct digits.

    ``negative`` selects what happens to the square root of a negative
    quantity: ``"complex"`` takes the principal branch, ``"error"`` raises
    :class:`NegativeRadicandError`.
    """

    qvalue: Fraction
    dps: int = DEFAULT_DPS
    negative: str = "complex"
    ctx: MPContext = field(init=False, repr=False, compare=False)

    name = "numeric"
    convention = "orthonormal"
    exact = False

    def __post_init__(self):
        object.__setattr__(self, "qvalue", to_fraction(self.qvalue))
        if self.qvalue <= 0:
            raise ValueError("numeric backend needs q > 0")
        object.__setattr__(self, "ctx", make_context(self.dps))

    def _m(self, x):
        return _as_mpf(self.ctx, to_fraction(x) if isinstance(x, (int, str, float)) else x)

    @property
    def qnum(self):
        return self._m(self.qvalue)

    def zero(self):
        return self.ctx.mpf(0)

    def one(self):
        return self.ctx.mpf(1)

    def const(self, c):
        return self._m(c)

    def q(self):
        return self.qnum

    def qbar(self):
        return 1 / self.qnum

    def qint(self, x):
        return qnum_eval(self._m(x), self.qnum, self.ctx)

    def qpow(self, x):
        return self.ctx.power(self.qnum, self._m(x))

    def bose(self, squared: int, mono: int):
        return self.ctx.sqrt(squared)

    def sqrt_qprod(self, qints: Sequence, rational=1):
        r = self._m(rational)
        for x in qints:
            r *= self.qint(x)
        if r < 0 and self.negative == "error":
            raise NegativeRadicandError(f"negative radicand {self.ctx.nstr(r, 8)}")
        return self.ctx.sqrt(r)

    def div_q_minus_qbar(self, x):
        if self.qvalue == 1:
            raise ZeroDivisionError("q - 1/q vanishes at q = 1")
        return x / (self.qnum - 1 / self.qnum)

    def is_zero(self, x, tol=NUMERIC_TOL) -> ZeroVerdict:
        tol_m = self._m(tol)
        v = abs(x)
        ok = v < tol_m
        return ZeroVerdict(bool(ok), "sampled" if ok else "nonzero", (str(self.qvalue),), self.ctx.nstr(v, 5))

    def evaluate(self, x, q=None):
        return x

    def to_json(self, x):
        x = self.ctx.mpmathify(x)
        if isinstance(x, self.ctx.mpc):
            out = {"numeric": self.ctx.nstr(x.real, self.dps)}
            if x.imag:
                out["imag"] = self.ctx.nstr(x.imag, self.dps)
            return out
        return {"numeric": self.ctx.nstr(x, self.dps)}

    def from_json(self, obj):
        v = self.ctx.mpf(obj["numeric"])
        if "imag" in obj:
            v = self.ctx.mpc(v, self.ctx.mpf(obj["imag"]))
        return v

    def describe(self) -> dict:
        return {"backend": self.name, "convention": self.convention, "q": _frac_str(self.qvalue),
                "dps": self.dps}


def make_backend(name: str, q=None, dps: int | None = None, negative: str = "complex"):
    if name == "exact-laurent":
        return LaurentBackend()
    if name == "exact-radical":
        return RadicalBackend()
    if name == "numeric":
        if q is None:
            raise ValueError("numeric backend needs a value of q")
        return NumericBackend(to_fraction(q), dps if dps is not None else
                              int(os.environ.get("QREAL_PRECISION", DEFAULT_DPS)), negative)
    raise ValueError(f"unknown backend {name!r}")
