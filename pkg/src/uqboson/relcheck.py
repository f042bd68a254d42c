"""Evaluate relations against a realization and verify them under truncation guards."""
from __future__ import annotations

from dataclasses import asdict, dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .dsl import (Bracket, Difference, GenRef, Neg, Num, Product, QBracketOfH, QInt, QPow, QSym,
                  Relation, ScalarMul, Sum, Zero, parse_relation, to_text)
from .fock import SparseOp, compose
from .qscalar import SAMPLE_QS

EXACT_PASS = "exact-pass"
SAMPLED_PASS = "sampled-pass"
FAIL = "fail"
INSUFFICIENT = "insufficient-truncation"


class EvaluationError(ValueError):
    pass


@dataclass(frozen=True)
class Evaluated:
    op: SparseOp
    shift: int
    excursion: int  # highest degree reached above the starting state

    @property
    def guard(self) -> int:
        return max(0, self.excursion)


def _scalar(node, backend):
    if isinstance(node, Num):
        return backend.const(node.value)
    if isinstance(node, QSym):
        return backend.q() if node.name == "q" else backend.qbar()
    if isinstance(node, QInt):
        return backend.qint(node.k)
    raise EvaluationError(f"not a scalar: {node!r}")


def _op(r, label: str) -> SparseOp:
    try:
        return r.ops[label]
    except KeyError:
        raise EvaluationError(f"unknown label {label!r} for this realization") from None


def _eval(node, r) -> Evaluated:
    be = r.backend
    if isinstance(node, Zero):
        return Evaluated(SparseOp(r.basis), 0, 0)
    if isinstance(node, (Num, QSym, QInt)):
        return Evaluated(SparseOp.identity(r.basis, _scalar(node, be)), 0, 0)
    if isinstance(node, GenRef):
        op = _op(r, node.label)
        s = op.shift if op.shift is not None else 0
        return Evaluated(op, s, max(0, s))
    if isinstance(node, QBracketOfH):
        if not node.label.startswith("h"):
            raise EvaluationError(f"qbracket() takes a Cartan label, got {node.label!r}")
        qh = _op(r, "qh" + node.label[1:])
        qhbar = _op(r, "qhbar" + node.label[1:])
        return Evaluated((qh - qhbar).map(be.div_q_minus_qbar), 0, 0)
    if isinstance(node, QPow):
        ev = r.exponents.get(node.label)
        if ev is None:
            raise EvaluationError(f"qpow() needs a diagonal label with known eigenvalues, got {node.label!r}")
        return Evaluated(SparseOp.diagonal(r.basis, [be.qpow(node.sign * x) for x in ev]), 0, 0)
    if isinstance(node, ScalarMul):
        inner = _eval(node.expr, r)
        return Evaluated(inner.op.scale(_scalar(node.scalar, be)), inner.shift, inner.excursion)
    if isinstance(node, Neg):
        inner = _eval(node.expr, r)
        return Evaluated(inner.op.scale(-1), inner.shift, inner.excursion)
    if isinstance(node, Product):
        a, b = _eval(node.left, r), _eval(node.right, r)
        return _product(a, b)
    if isinstance(node, Bracket):
        a, b = _eval(node.left, r), _eval(node.right, r)
        ab, ba = _product(a, b), _product(b, a)
        x = {"one": be.one(), "q": be.q(), "qbar": be.qbar()}[node.deform]
        return Evaluated(ab.op - ba.op.scale(x), ab.shift, max(ab.excursion, ba.excursion))
    if isinstance(node, (Sum, Difference, Relation)):
        left = node.lhs if isinstance(node, Relation) else node.left
        right = node.rhs if isinstance(node, Relation) else node.right
        a, b = _eval(left, r), _eval(right, r)
        op = a.op + b.op if isinstance(node, Sum) else a.op - b.op
        return Evaluated(op, max(a.shift, b.shift), max(a.excursion, b.excursion))
    raise EvaluationError(f"cannot evaluate {node!r}")


def _product(a: Evaluated, b: Evaluated) -> Evaluated:
    # b acts first: it reaches b.excursion, then a starts from degree + b.shift
    return Evaluated(compose(a.op, b.op), a.shift + b.shift, max(b.excursion, b.shift + a.excursion))


def eval_expr(ast, r) -> tuple[SparseOp, int]:
    """Evaluate to ``(operator, guard)``; a relation evaluates as ``lhs - rhs``."""
    ev = _eval(ast, r)
    return ev.op, ev.guard


@dataclass
class RelationReport:
    relation: str
    guard: int
    dimension: int
    verdict: str
    worst_residual: str = "0"
    witness: dict | None = None
    samples: tuple[str, ...] = ()
    sampled_entries: int = 0
    subspace: str = "guarded"

    @property
    def passed(self) -> bool:
        return self.verdict in (EXACT_PASS, SAMPLED_PASS)

    def to_json(self) -> dict:
        d = asdict(self)
        d["samples"] = list(self.samples)
        return d


def _witness(r, i, j, v) -> dict:
    be = r.backend
    return {"row": i, "col": j, "row_state": list(r.basis.states[i]),
            "col_state": list(r.basis.states[j]), "entry": be.to_json(v), "entry_text": str(v)}


def check_relation(ast, r, restrict: str | None = None) -> RelationReport:
    """Check that ``lhs - rhs`` vanishes on the columns it can be trusted on.

    By default those are the states of degree ``<= L - guard``.  A closed HP
    truncation (``L == p``) or ``restrict="F0"`` (HP with natural ``p`` and
    ``L >= p``) checks the invariant block of degree ``<= p`` without a guard.
    """
    text = to_text(ast)
    ev = _eval(ast, r)
    guard = ev.guard
    subspace = "guarded"
    if restrict == "F0" or getattr(r, "closed", False):
        if not (r.kind in ("hp", "hp-deformed") and r.p_is_natural and r.L >= r.p):
            raise EvaluationError("F0 restriction needs an HP realization with natural p <= L")
        top = int(r.p)
        guard = 0
        subspace = "F0"
    else:
        top = r.L - guard
    if top < 0:
        return RelationReport(text, guard, 0, INSUFFICIENT, subspace=subspace)
    cols = r.basis.band(0, top)
    be = r.backend
    worst_mag, worst_entry, first_fail = -1.0, None, None
    sampled = 0
    for j in cols:
        for i, v in sorted(ev.op.cols.get(j, {}).items()):
            z = be.is_zero(v)
            sampled += z.kind == "sampled"
            mag = float(z.max_abs)
            if mag > worst_mag:
                worst_mag, worst_entry = mag, (i, j, v)
            if not z.zero and first_fail is None:
                first_fail = (i, j, v)
    worst = z_str(worst_mag)
    if be.exact:
        samples = SAMPLE_QS if sampled else ()
    else:
        samples = (str(be.qvalue),)
    if first_fail is not None:
        i, j, v = first_fail if be.exact else worst_entry
        if be.exact and worst_mag <= 0:
            worst = "exact-nonzero"
        return RelationReport(text, guard, len(cols), FAIL, worst, _witness(r, i, j, v), samples,
                              sampled, subspace)
    verdict = EXACT_PASS if be.exact and not sampled else SAMPLED_PASS
    return RelationReport(text, guard, len(cols), verdict, worst, None, samples, sampled, subspace)


def z_str(mag: float) -> str:
    return "0" if mag <= 0 else f"{mag:.3e}"


# --- relation suites ------------------------------------------------------


def _cartan_coeff(i: int, j: int) -> int:
    return 2 * (i == j) - (i == j - 1) - (i - 1 == j)


def _linear(lhs: str, c: int, x: str) -> str:
    """``lhs - c x = 0`` written without double signs."""
    if c == 0:
        return f"{lhs} = 0"
    if c == 1:
        return f"{lhs} - {x} = 0"
    if c == -1:
        return f"{lhs} + {x} = 0"
    if c > 0:
        return f"{lhs} - {c} {x} = 0"
    return f"{lhs} + {-c} {x} = 0"


def standard_suite_text(n: int) -> list[str]:
    """Cartan and Serre relations of U_q[sl(n+1)] as relation text."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = range(1, n + 1)
    out = []
    for i in rng:
        for j in rng:
            out.append(_linear(f"[h{i}, e{j}]", _cartan_coeff(i, j), f"e{j}"))
    for i in rng:
        for j in rng:
            out.append(_linear(f"[h{i}, f{j}]", -_cartan_coeff(i, j), f"f{j}"))
    for i in rng:
        for j in rng:
            out.append(f"[e{i}, f{j}] - qbracket(h{i}) = 0" if i == j else f"[e{i}, f{j}] = 0")
    for g in "ef":
        for i in rng:
            for j in rng:
                if i <= j and abs(i - j) != 1:
                    out.append(f"[{g}{i}, {g}{j}] = 0")
    for g in "ef":
        for i in rng:
            for k in (i - 1, i + 1):
                if 1 <= k <= n:
                    out.append(f"[{g}{i}, [{g}{i}, {g}{k}]_qbar]_q = 0")
                    out.append(f"[{g}{i}, [{g}{i}, {g}{k}]_q]_qbar = 0")
    return out


def standard_suite_size(n: int) -> int:
    commuting_pairs = n * (n + 1) // 2 - (n - 1)
    return 3 * n * n + 2 * commuting_pairs + 8 * (n - 1)


def standard_suite(n: int) -> list[Relation]:
    return [parse_relation(t) for t in standard_suite_text(n)]


def oscillator_suite_text(n: int) -> list[str]:
    """Deformed-oscillator relations.

    The q-bracket ``[a~_i^-, a~_j^+]_q = q^-N~_i`` is imposed for ``i == j``;
    different modes commute in the ordinary sense.
    """
    rng = range(1, n + 1)
    out = []
    for i in rng:
        for j in rng:
            if i == j:
                out.append(f"[atilde{i}m, atilde{i}p]_q - qpow(-Ntilde{i}) = 0")
            else:
                out.append(f"[atilde{i}m, atilde{j}p] = 0")
    for i in rng:
        for j in rng:
            if i == j:
                out.append(f"[Ntilde{i}, atilde{j}p] - atilde{j}p = 0")
                out.append(f"[Ntilde{i}, atilde{j}m] + atilde{j}m = 0")
            else:
                out.append(f"[Ntilde{i}, atilde{j}p] = 0")
                out.append(f"[Ntilde{i}, atilde{j}m] = 0")
    for i in rng:
        for k in rng:
            if i < k:
                out.append(f"[atilde{i}p, atilde{k}p] = 0")
                out.append(f"[atilde{i}m, atilde{k}m] = 0")
                out.append(f"[Ntilde{i}, Ntilde{k}] = 0")
    return out


def oscillator_suite(n: int) -> list[Relation]:
    return [parse_relation(t) for t in oscillator_suite_text(n)]


def check_suite(relations: Iterable, r, restrict: str | None = None) -> list[RelationReport]:
    return [check_relation(ast, r, restrict) for ast in relations]


# --- corpus files ---------------------------------------------------------


def write_corpus(path, texts: Sequence[str], header: str = "") -> None:
    lines = [f"# {h}" for h in header.splitlines()] if header else []
    lines += [to_text(parse_relation(t)) for t in texts]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_corpus(path) -> list[tuple[int, str, Relation]]:
    """``(line_number, text, ast)`` for every relation line; ``#`` starts a comment."""
    out = []
    for no, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        body = line.split("#", 1)[0].strip()
        if body:
            out.append((no, body, parse_relation(body)))
    return out


def shipped_corpus(name: str) -> Path:
    return Path(str(resources.files("uqboson") / "data" / name))
