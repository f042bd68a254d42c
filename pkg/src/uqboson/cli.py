"""Command line front end.

Exit codes: 0 success, 1 a relation or claim failed, 2 bad configuration,
3 the realization could not be built.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import __version__
from .dsl import RelationSyntaxError, labels
from .qscalar import NegativeRadicandError, make_backend, to_fraction
from .realization import KINDS, BuildError, build, build_deformed_oscillators, gl_extend
from .relcheck import (EvaluationError, check_relation, oscillator_suite, read_corpus,
                       standard_suite)
from .repranalysis import (InsufficientTruncation, classical_limit_for, f0_dimension,
                           invariance_check, irreducibility_probe, limit_truncation,
                           unitarity_check, weights)

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_BUILD = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    n: int
    p: Fraction
    L: int
    kind: str
    backend: str  # "exact" | "numeric"
    q: Fraction | None
    corpus: Path | None
    output: Path | None
    fmt: str
    seed: int
    gl: bool = False
    restrict: str | None = None

    @property
    def backend_name(self) -> str:
        if self.backend == "numeric":
            return "numeric"
        return "exact-laurent" if self.kind == "dyson" else "exact-radical"

    def make_backend(self):
        return make_backend(self.backend_name, q=self.q)

    def meta(self) -> dict:
        return {"tool": "uqboson", "version": __version__, "command": self.command, "n": self.n,
                "p": str(self.p), "L": self.L, "kind": self.kind, "backend": self.backend_name,
                "q": None if self.q is None else str(self.q), "seed": self.seed}


def _config(args) -> RunConfig:
    try:
        p = to_fraction(args.p)
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"cannot parse p={args.p!r}") from None
    q = None
    if args.q is not None:
        try:
            q = to_fraction(args.q)
        except (ValueError, ZeroDivisionError):
            raise ConfigError(f"cannot parse q={args.q!r}") from None
    backend = args.backend or ("numeric" if q is not None and args.command != "limit" else "exact")
    if args.n < 1:
        raise ConfigError("--n must be >= 1")
    if args.trunc < 1:
        raise ConfigError("--trunc must be >= 1")
    if backend == "exact" and p.denominator != 1:
        raise ConfigError("exact backend requires integer p")
    if backend == "numeric":
        if args.command == "limit":
            raise ConfigError("limit requires the exact backend")
        if q is None:
            raise ConfigError("numeric backend requires --q")
        if q <= 0 or q == 1:
            raise ConfigError("numeric backend requires q > 0 and q != 1")
    if args.format == "matrixmarket" and backend != "numeric":
        raise ConfigError("Matrix Market export is only available for the numeric backend")
    if args.format == "matrixmarket" and args.output is None:
        raise ConfigError("Matrix Market export writes one file per operator; give --output DIR")
    return RunConfig(args.command, args.n, p, args.trunc, args.kind, backend, q,
                     Path(args.corpus) if getattr(args, "corpus", None) else None,
                     Path(args.output) if args.output else None, args.format, args.seed,
                     getattr(args, "gl", False), getattr(args, "restrict", None))


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.output is None:
        sys.stdout.write(text)
    else:
        cfg.output.parent.mkdir(parents=True, exist_ok=True)
        cfg.output.write_text(text, encoding="utf-8")


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


# --- build ----------------------------------------------------------------


def _op_labels(r) -> list[str]:
    extra = [f"{k}{i}" for i in range(1, r.n + 1) for k in ("qh", "qhbar")]
    return r.generators() + extra + (["I"] if "I" in r.ops else [])


def realization_json(r, cfg: RunConfig) -> dict:
    be = r.backend
    meta = cfg.meta()
    meta.update(be.describe())
    ops = {}
    for label in _op_labels(r):
        cols: dict[str, list] = {}
        for i, j, v in r.ops[label].entries():
            cols.setdefault(str(j), []).append([i, be.to_json(v)])
        ops[label] = {"shift": r.ops[label].shift, "cols": cols}
    return {"meta": meta, "basis": [list(s) for s in r.basis.states], "operators": ops}


def _matrix_market(r, outdir: Path) -> None:
    ctx = r.backend.ctx
    outdir.mkdir(parents=True, exist_ok=True)
    size = len(r.basis)
    for label in _op_labels(r):
        entries = list(r.ops[label].entries())
        cplx = any(isinstance(ctx.mpmathify(v), ctx.mpc) for _, _, v in entries)
        lines = [f"%%MatrixMarket matrix coordinate {'complex' if cplx else 'real'} general",
                 f"% uqboson {label} n={r.n} p={r.p} L={r.L} kind={r.kind} q={r.backend.qvalue}",
                 f"{size} {size} {len(entries)}"]
        for i, j, v in entries:
            v = ctx.mpmathify(v)
            val = f"{ctx.nstr(v.real, 30)} {ctx.nstr(v.imag, 30)}" if cplx else ctx.nstr(v, 30)
            lines.append(f"{i + 1} {j + 1} {val}")
        (outdir / f"{label}.mtx").write_text("\n".join(lines) + "\n", encoding="utf-8")


def _text_ops(r) -> str:
    out = [f"# {r.kind} realization n={r.n} p={r.p} L={r.L} backend={r.backend.name}"]
    for label in _op_labels(r):
        out.append(f"{label}:")
        for i, j, v in r.ops[label].entries():
            out.append(f"  {r.basis.states[i]} <- {r.basis.states[j]} : {v}")
    return "\n".join(out) + "\n"


def cmd_build(cfg: RunConfig) -> int:
    r = build(cfg.kind, cfg.n, cfg.p, cfg.L, cfg.make_backend())
    if cfg.gl:
        r = gl_extend(r)
    if cfg.fmt == "json":
        _emit(cfg, _dumps(realization_json(r, cfg)))
    elif cfg.fmt == "text":
        _emit(cfg, _text_ops(r))
    else:
        _matrix_market(r, cfg.output)
    return EXIT_OK


# --- verify ---------------------------------------------------------------


def _relations(cfg: RunConfig):
    if cfg.corpus is not None:
        try:
            return [(text, ast) for _, text, ast in read_corpus(cfg.corpus)]
        except OSError as exc:
            raise ConfigError(f"cannot read corpus: {exc}") from None
        except RelationSyntaxError as exc:
            raise ConfigError(f"corpus syntax error: {exc}") from None
    rels = [(None, ast) for ast in standard_suite(cfg.n)]
    if cfg.kind == "hp-deformed":
        rels += [(None, ast) for ast in oscillator_suite(cfg.n)]
    return rels


def _is_oscillator(ast) -> bool:
    return any(lab.startswith(("atilde", "Ntilde")) for lab in labels(ast))


def cmd_verify(cfg: RunConfig) -> int:
    rels = _relations(cfg)
    backend = cfg.make_backend()
    r = build(cfg.kind, cfg.n, cfg.p, cfg.L, backend)
    if cfg.gl:
        r = gl_extend(r)
    osc = None
    reports = []
    for _, ast in rels:
        target = r
        if _is_oscillator(ast):
            if osc is None:
                osc = build_deformed_oscillators(cfg.n, cfg.L, backend)
            target = osc
        try:
            rep = check_relation(ast, target, cfg.restrict if target is r else None)
        except EvaluationError as exc:
            raise ConfigError(str(exc)) from None
        reports.append(rep)
    failed = [x for x in reports if not x.passed]
    numeric = [float(x.worst_residual) for x in reports if x.worst_residual not in ("exact-nonzero",)]
    summary = {"total": len(reports), "passed": len(reports) - len(failed), "failed": len(failed),
               "sampled_fallbacks": sum(1 for x in reports if x.sampled_entries),
               "max_residual": f"{max(numeric, default=0.0):.3e}"}
    if cfg.fmt == "json":
        _emit(cfg, _dumps({"meta": cfg.meta(), "summary": summary,
                           "reports": [x.to_json() for x in reports]}))
    else:
        lines = [f"{'PASS' if x.passed else 'FAIL'} {x.verdict:<24} guard={x.guard} dim={x.dimension} "
                 f"residual={x.worst_residual}  {x.relation}" for x in reports]
        for x in failed:
            if x.witness:
                lines.append(f"  witness for {x.relation}: {x.witness['row_state']} <- "
                             f"{x.witness['col_state']} : {x.witness['entry_text']}")
        lines.append(f"{summary['passed']}/{summary['total']} passed, max residual {summary['max_residual']}")
        _emit(cfg, "\n".join(lines) + "\n")
    return EXIT_OK if not failed else EXIT_FAIL


# --- analyze --------------------------------------------------------------


def cmd_analyze(cfg: RunConfig, selected: list[str]) -> int:
    if not selected:
        raise ConfigError("select at least one of --weights --invariance --unitarity --irreducibility-probe")
    r = build(cfg.kind, cfg.n, cfg.p, cfg.L, cfg.make_backend())
    out: dict = {"meta": cfg.meta()}
    ok = True
    try:
        if "weights" in selected:
            w = weights(r)
            out["weights"] = [{"state": list(s), "h": [str(x) for x in h]} for s, h in w]
            if r.p_is_natural and cfg.n == 1 and cfg.L >= cfg.p:
                spectrum = sorted(h[0] for s, h in w if sum(s) <= cfg.p)
                sym = spectrum == sorted(-x for x in spectrum)
                out["f0_h1_palindromic"] = sym
                ok &= sym
        if "invariance" in selected:
            f0 = invariance_check(r, "F0")
            f1 = invariance_check(r, "F1")
            expected_f0 = cfg.kind != "dyson"
            holds = f1.invariant and f0.invariant == expected_f0
            out["invariance"] = {"F0": f0.to_json(), "F1": f1.to_json(),
                                 "F0_dimension": f0_dimension(cfg.n, int(cfg.p)),
                                 "expected": {"F0": expected_f0, "F1": True}, "holds": holds}
            ok &= holds
        if "unitarity" in selected:
            u = unitarity_check(r, expect_fail=cfg.kind == "dyson")
            out["unitarity"] = u.to_json()
            ok &= u.passed
        if "irreducibility-probe" in selected:
            pr = irreducibility_probe(r)
            out["irreducibility_probe"] = pr.to_json()
            ok &= pr.passed
    except InsufficientTruncation as exc:
        raise ConfigError(str(exc)) from None
    except ValueError as exc:
        if isinstance(exc, (BuildError, NegativeRadicandError)):
            raise
        raise ConfigError(str(exc)) from None
    out["holds"] = ok
    if cfg.fmt == "json":
        _emit(cfg, _dumps(out))
    else:
        lines = [f"{k}: {json.dumps(v)}" for k, v in out.items()]
        _emit(cfg, "\n".join(lines) + "\n")
    return EXIT_OK if ok else EXIT_FAIL


# --- limit ----------------------------------------------------------------


def cmd_limit(cfg: RunConfig) -> int:
    rep = classical_limit_for(cfg.kind, cfg.n, cfg.p, cfg.L)
    out = {"meta": cfg.meta(), "effective_L": limit_truncation(cfg.kind, int(cfg.p), cfg.L),
           "limit": rep.to_json()}
    if cfg.fmt == "json":
        _emit(cfg, _dumps(out))
    else:
        msg = "classical limit matches" if rep.passed else f"mismatch: {rep.mismatch}"
        _emit(cfg, msg + "\n")
    return EXIT_OK if rep.passed else EXIT_FAIL


# --- entry point ----------------------------------------------------------


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, required=True, help="rank: the algebra is U_q[sl(n+1)]")
    common.add_argument("--p", required=True, help="representation parameter (integer, a/b or decimal)")
    common.add_argument("--trunc", type=int, required=True, help="truncation level L (max total degree)")
    common.add_argument("--kind", choices=KINDS, default="dyson")
    common.add_argument("--backend", choices=("exact", "numeric"), default=None,
                        help="default: numeric when --q is given, else exact")
    common.add_argument("--q", default=None, help="deformation parameter for the numeric backend")
    common.add_argument("--output", default=None)
    common.add_argument("--format", choices=("json", "matrixmarket", "text"), default="json")
    common.add_argument("--seed", type=int, default=0)

    ap = argparse.ArgumentParser(prog="uqboson", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"uqboson {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    b = sub.add_parser("build", parents=[common], help="write generator matrices")
    b.add_argument("--gl", action="store_true", help="include the central element I")
    v = sub.add_parser("verify", parents=[common], help="check defining relations")
    v.add_argument("--corpus", default=None, help="relation file, one relation per line")
    v.add_argument("--restrict", choices=("F0",), default=None,
                   help="check only the invariant F0 block (HP with natural p)")
    v.add_argument("--gl", action="store_true", help="include the central element I")
    a = sub.add_parser("analyze", parents=[common], help="representation analyses")
    for flag in ("weights", "invariance", "unitarity", "irreducibility-probe"):
        a.add_argument(f"--{flag}", action="store_true")
    sub.add_parser("limit", parents=[common], help="compare q = 1 with the classical realization")
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = _parser()
    args = ap.parse_args(argv)
    try:
        cfg = _config(args)
        if cfg.command == "build":
            return cmd_build(cfg)
        if cfg.command == "verify":
            return cmd_verify(cfg)
        if cfg.command == "analyze":
            selected = [f for f in ("weights", "invariance", "unitarity", "irreducibility-probe")
                        if getattr(args, f.replace("-", "_"))]
            return cmd_analyze(cfg, selected)
        return cmd_limit(cfg)
    except ConfigError as exc:
        print(f"uqboson: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (BuildError, NegativeRadicandError) as exc:
        print(f"uqboson: build error: {exc}", file=sys.stderr)
        return EXIT_BUILD


if __name__ == "__main__":
    sys.exit(main())
