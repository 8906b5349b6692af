"""Command-line interface.

Exit codes: 0 ran without violations, 1 some verdict violated, 2 usage or
input error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .classes import ClassParams, classify
from .errors import LamcommError, MatrixFileError, UnknownTheorem
from .harness import THEOREMS, VIOLATED, verify
from .linalg import DEFAULT_TOL, Tolerances
from .pairs import MATRIX_FAMILIES, PAIR_FAMILIES, PairRecipe, make_instance, parse_family_spec
from .serialize import (
    class_report_doc,
    dumps,
    loads,
    matrix_to_doc,
    read_matrix,
    report_document,
    suite_report_doc,
    verdict_doc,
)
from .suite import SuiteConfig, counterexample_search, run_suite

OK, VIOLATIONS, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def parse_dims(text: str) -> tuple:
    """``"2..8"`` or ``"2,3,5"`` (or a mix) to a tuple of ints."""
    dims = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        lo, sep, hi = part.partition("..")
        try:
            if sep:
                dims.extend(range(int(lo), int(hi) + 1))
            else:
                dims.append(int(part))
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid dims {text!r}") from None
    if any(d < 1 for d in dims):
        raise argparse.ArgumentTypeError("dims must be positive")
    return tuple(dims)


def _tolerances(args) -> Tolerances:
    try:
        return Tolerances(
            eq_tol=args.eq_tol if args.eq_tol is not None else DEFAULT_TOL.eq_tol,
            psd_tol=args.psd_tol if args.psd_tol is not None else DEFAULT_TOL.psd_tol,
            spec_tol=args.spec_tol if args.spec_tol is not None else DEFAULT_TOL.spec_tol,
            margin_gate=args.margin_gate if args.margin_gate is not None else DEFAULT_TOL.margin_gate,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _emit(text: str, path=None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror or exc}") from exc


def _fmt(x) -> str:
    return "-" if x is None else f"{x + 0.0:.3e}"


def cmd_classify(args) -> int:
    tol = _tolerances(args)
    T = read_matrix(args.path)
    try:
        params = ClassParams(p=args.p, k=args.k, M=args.M, restarts=args.restarts, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    report = classify(T, tol, params)
    if args.table:
        lines = [f"{'class':<24}{'verdict':<14}{'margin':>12}"]
        for cid, e in report.entries.items():
            lines.append(f"{cid:<24}{e.verdict:<14}{_fmt(e.margin):>12}")
        _emit("\n".join(lines) + "\n")
    else:
        _emit(dumps(report_document(args.seed, tol, [class_report_doc(report)], __version__)))
    return OK


def _recipe(args) -> PairRecipe:
    if args.family == "direct_sum":
        if not args.of:
            raise UsageError("direct_sum needs --of FAMILY:DIM,FAMILY:DIM,...")
        return parse_family_spec("direct_sum:" + args.of)
    if args.family not in PAIR_FAMILIES + MATRIX_FAMILIES or args.family == "custom":
        raise UsageError(f"unknown family {args.family!r}")
    params = {}
    if args.family == "scaled":
        params = {"alpha": complex(args.alpha), "beta": complex(args.beta)}
    return PairRecipe(args.family, args.dim, params, args.seed)


def cmd_pair(args) -> int:
    tol = _tolerances(args)
    try:
        out = make_instance(_recipe(args), tol)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if not isinstance(out, tuple):
        raise UsageError(f"{args.family!r} builds a single matrix, not a pair")
    A, B, cert = out
    cert_doc = report_document(args.seed, tol, [cert], __version__)
    if args.out is None:
        _emit(dumps(cert_doc))
        return OK
    out_dir = Path(args.out)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise UsageError(f"cannot create {out_dir}: {exc.strerror or exc}") from exc
    _emit(dumps(matrix_to_doc(A)), out_dir / "A.json")
    _emit(dumps(matrix_to_doc(B)), out_dir / "B.json")
    _emit(dumps(cert_doc), out_dir / "certificate.json")
    return OK


def _verify_inputs(args, tol):
    if args.family:
        try:
            recipe = parse_family_spec(args.family)
            recipe = PairRecipe(recipe.family, recipe.dim, recipe.params, args.seed)
            out = make_instance(recipe, tol)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        return (out[0], out[1]) if isinstance(out, tuple) else (out, None)
    if args.a is None:
        raise UsageError("give --a PATH (and --b PATH) or --family SPEC")
    A = read_matrix(args.a)
    B = read_matrix(args.b) if args.b else None
    if B is not None and B.shape != A.shape:
        raise UsageError(f"A is {A.shape[0]}x{A.shape[0]} but B is {B.shape[0]}x{B.shape[0]}")
    return A, B


def cmd_verify(args) -> int:
    tol = _tolerances(args)
    if args.all == (args.theorem is not None):
        raise UsageError("give exactly one of --theorem ID or --all")
    ids = THEOREMS if args.all else (args.theorem,)
    for tid in ids:
        if tid not in THEOREMS:
            raise UnknownTheorem(tid)
    A, B = _verify_inputs(args, tol)
    basis = read_matrix_columns(args.basis) if args.basis else None
    verdicts = []
    for tid in ids:
        missing = None
        if tid not in ("normaloid_lemma", "restriction_lemma") and B is None:
            missing = "a second matrix (--b)"
        elif tid == "restriction_lemma" and basis is None:
            missing = "--basis PATH"
        if missing and not args.all:
            raise UsageError(f"{tid} needs {missing}")
        if missing:
            print(f"skipping {tid}: needs {missing}", file=sys.stderr)
            continue
        try:
            verdicts.append(verify(tid, A, B, basis=basis, k=args.k, tol=tol, seed=args.seed))
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    if args.json:
        _emit(dumps(report_document(args.seed, tol, [verdict_doc(v) for v in verdicts], __version__)))
    else:
        for v in verdicts:
            tag = " (one-sided)" if v.one_sided else ""
            _emit(f"{v.theorem_id:<22}{v.status}{tag}  margin={_fmt(v.conclusion_margin)}\n")
    return VIOLATIONS if any(v.status == VIOLATED for v in verdicts) else OK


def read_matrix_columns(path) -> np.ndarray:
    """Basis file: an ordinary matrix file whose leading columns are used.

    A ``"cols"`` key selects how many; without it every nonzero column is kept.
    """
    m = read_matrix(path)
    try:
        cols = loads(Path(path).read_text()).get("cols")
    except (OSError, ValueError, AttributeError):
        cols = None
    if cols is None:
        keep = np.linalg.norm(m, axis=0) > 0
        return m[:, keep]
    if isinstance(cols, bool) or not isinstance(cols, int) or not 1 <= cols <= m.shape[0]:
        raise MatrixFileError(f"{path}: 'cols' must be an integer in [1, dim]")
    return m[:, :cols]


def _suite_doc(args, tol, report) -> str:
    return dumps(report_document(args.seed, tol, [suite_report_doc(report)], __version__))


def cmd_suite(args) -> int:
    tol = _tolerances(args)
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    ids = tuple(args.theorem) if args.theorem else THEOREMS
    for tid in ids:
        if tid not in THEOREMS:
            raise UnknownTheorem(tid)
    config = SuiteConfig(dims=args.dims, trials=args.trials, seed=args.seed, tol=tol, theorems=ids, k=args.k)
    report = run_suite(config)
    _emit(_suite_doc(args, tol, report), args.report)
    return OK if report.ok else VIOLATIONS


def cmd_search(args) -> int:
    tol = _tolerances(args)
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    report = counterexample_search(args.theorem, args.trials, args.seed, tol, dims=args.dims)
    _emit(_suite_doc(args, tol, report), args.report)
    return OK if report.ok else VIOLATIONS


def _add_tol_flags(p):
    g = p.add_argument_group("tolerances")
    g.add_argument("--eq-tol", type=float)
    g.add_argument("--psd-tol", type=float)
    g.add_argument("--spec-tol", type=float)
    g.add_argument("--margin-gate", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lamcomm", description="Verification lab for lambda-commuting matrix pairs.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="classify a matrix file")
    p.add_argument("path")
    out = p.add_mutually_exclusive_group()
    out.add_argument("--json", action="store_true", help="JSON report (default)")
    out.add_argument("--table", action="store_true", help="human-readable table")
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--M", type=float, default=2.0)
    p.add_argument("--restarts", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    _add_tol_flags(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("pair", help="construct a lambda-commuting pair")
    p.add_argument("family")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--of", help="direct_sum components, e.g. clock_shift:2,clock_shift:2")
    p.add_argument("--alpha", type=complex, default=1.0)
    p.add_argument("--beta", type=complex, default=1.0)
    p.add_argument("--out", help="directory for A.json, B.json and certificate.json")
    _add_tol_flags(p)
    p.set_defaults(func=cmd_pair)

    p = sub.add_parser("verify", help="check one theorem (or all) on one instance")
    p.add_argument("--theorem")
    p.add_argument("--all", action="store_true")
    p.add_argument("--a")
    p.add_argument("--b")
    p.add_argument("--basis", help="matrix file whose columns span an invariant subspace")
    p.add_argument("--family", help="e.g. clock_shift:4 or direct_sum:clock_shift:2,clock_shift:2")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    _add_tol_flags(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("suite", help="run the seeded theorem suite")
    p.add_argument("--dims", type=parse_dims, default=(2, 3, 4, 5, 6, 7, 8))
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--theorem", action="append", help="restrict to these theorems (repeatable)")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--report", help="output path (default stdout)")
    _add_tol_flags(p)
    p.set_defaults(func=cmd_suite)

    p = sub.add_parser("search", help="hunt for counterexamples to one theorem")
    p.add_argument("--theorem", required=True)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dims", type=parse_dims, default=(2, 3, 4, 5, 6))
    p.add_argument("--report", help="output path (default stdout)")
    _add_tol_flags(p)
    p.set_defaults(func=cmd_search)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else USAGE
    try:
        return args.func(args)
    except (UsageError, LamcommError, KeyError, ValueError) as exc:
        print(f"lamcomm {args.command}: error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
