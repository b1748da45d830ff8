"""Command line front end.

One operator per JSON file.  Subcommands either print a JSON document to
stdout or, with -o, write it to a file and print the path.  Output is
deterministic: rerunning a command on the same inputs produces identical
bytes regardless of thread count.

Exit codes: 0 success, 2 unreadable input, 3 shape mismatch, 4 degree
budget exceeded, 5 factorization failed, 1 anything else.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import zoo
from .duality import (
    SearchBudgetError,
    TorsionWitnessError,
    ext_module,
    minimal_parametrization,
    param_test,
)
from .engine import BudgetExceeded, fraction_rank, resolve_module
from .operators import (
    NotFactorable,
    OpFormatError,
    ShapeMismatch,
    adjoint,
    cc,
    compose,
    factor_through,
    load_operator,
    operator_json,
)
from .poly import ParseError, serialize
from .report import format_rows, rows_to_json, run_report

EXIT_PARSE = 2
EXIT_SHAPE = 3
EXIT_BUDGET = 4
EXIT_FACTOR = 5


def _target_path(out: str, stem: str) -> Path:
    p = Path(out)
    if p.is_dir() or out.endswith(("/", "\\")):
        return p / f"{stem}.json"
    return p


def _emit_text(doc: str, out: str | None, stem: str) -> None:
    if out is None:
        sys.stdout.write(doc)
        return
    path = _target_path(out, stem)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(doc)
    print(f"wrote {path}")


def _emit_operator(op, out: str | None) -> None:
    _emit_text(operator_json(op), out, op.name)


def _emit_json(payload: dict, out: str | None, stem: str) -> None:
    _emit_text(json.dumps(payload, indent=2) + "\n", out, stem)


# -- subcommand handlers ---------------------------------------------------------


def _cmd_cc(args) -> int:
    op = load_operator(args.operator)
    _emit_operator(cc(op), args.output)
    return 0


def _cmd_adjoint(args) -> int:
    op = load_operator(args.operator)
    _emit_operator(adjoint(op), args.output)
    return 0


def _cmd_compose(args) -> int:
    outer = load_operator(args.outer)
    inner = load_operator(args.inner)
    _emit_operator(compose(outer, inner), args.output)
    return 0


def _cmd_resolve(args) -> int:
    op = load_operator(args.operator)
    res = resolve_module(
        op.rows(), max_steps=args.steps, threads=args.threads
    )
    summary = {
        "operator": op.name,
        "nvars": res.nvars,
        "source_width": res.source_width,
        "dims": list(res.dims),
        "orders": [list(o) for o in res.orders],
        "euler_characteristic": res.euler_characteristic,
        "complete": res.complete,
    }
    doc = json.dumps(summary, indent=2) + "\n"
    if args.output is None:
        sys.stdout.write(doc)
        return 0
    outdir = Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "summary.json").write_text(doc)
    for k, step in enumerate(res.steps):
        step_doc = {
            "index": k,
            "rows": [[serialize(p) for p in e.entries] for e in step],
        }
        (outdir / f"step{k:02d}.json").write_text(
            json.dumps(step_doc, indent=2) + "\n"
        )
    print(f"wrote {outdir}/summary.json and {len(res.steps)} step files")
    return 0


def _cmd_rank(args) -> int:
    op = load_operator(args.operator)
    payload = {
        "operator": op.name,
        "rows": len(op.matrix),
        "columns": op.source.dim,
        "rank": fraction_rank(op.rows()),
    }
    _emit_json(payload, args.output, f"{op.name}_rank")
    return 0


def _cmd_paramtest(args) -> int:
    op = load_operator(args.operator)
    rep = param_test(op)
    payload = {
        "operator": op.name,
        "parametrizable": rep.parametrizable,
        "ext1_zero": rep.ext1_zero,
        "ext2_zero": rep.ext2_zero,
        "potentials": rep.potentials,
        "torsion": [
            {
                "row": [serialize(p) for p in t.row.entries],
                "order": t.order,
                "annihilator": serialize(t.annihilator),
            }
            for t in rep.torsion
        ],
        "parametrization": rep.parametrization.entry_strs(),
        "recomputed_conditions": rep.recomputed_cc.entry_strs(),
    }
    _emit_json(payload, args.output, f"{op.name}_paramtest")
    if args.output is not None:
        verdict = "parametrizable" if rep.parametrizable else "NOT parametrizable"
        print(
            f"{op.name}: {verdict}; {len(rep.torsion)} torsion generators; "
            f"{rep.potentials} potentials"
        )
    return 0


def _cmd_minparam(args) -> int:
    op = load_operator(args.operator)
    _emit_operator(minimal_parametrization(op), args.output)
    return 0


def _cmd_ext(args) -> int:
    op = load_operator(args.operator)
    rep = ext_module(op, args.index)
    payload = {
        "operator": op.name,
        "index": rep.index,
        "is_zero": rep.is_zero,
        "rank": rep.rank,
        "generators": [
            [serialize(p) for p in g.entries] for g in rep.generators
        ],
        "relations": [
            [serialize(p) for p in r.entries] for r in rep.relations
        ],
    }
    _emit_json(payload, args.output, f"{op.name}_ext{rep.index}")
    return 0


def _cmd_factor(args) -> int:
    left = load_operator(args.left)
    through = load_operator(args.through)
    _emit_operator(factor_through(left, through), args.output)
    return 0


def _cmd_zoo(args) -> int:
    if args.name is None:
        width = max(len(k) for k in zoo.ZOO)
        for key in sorted(zoo.ZOO):
            entry = zoo.ZOO[key]
            needs = []
            if entry.needs_metric:
                needs.append("--metric --n")
            elif entry.needs_n:
                needs.append("--n")
            if entry.needs_lame:
                needs.append("--lam --mu")
            if entry.needs_r:
                needs.append("--r")
            if entry.fixed_n is not None:
                needs.append(f"n={entry.fixed_n}")
            extra = f"  [{', '.join(needs)}]" if needs else ""
            print(f"{key.ljust(width)}  {entry.summary}{extra}")
        return 0
    op = zoo.build(
        args.name,
        n=args.n,
        metric=args.metric,
        lam=Fraction(args.lam),
        mu=Fraction(args.mu),
        r=args.r,
    )
    _emit_operator(op, args.output)
    return 0


def _cmd_report(args) -> int:
    rows = run_report(only=args.only)
    if args.output is not None:
        path = Path(args.output)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(rows_to_json(rows))
    if args.json:
        sys.stdout.write(rows_to_json(rows))
    else:
        sys.stdout.write(format_rows(rows))
    if not rows:
        print("no checks matched --only filter", file=sys.stderr)
        return 1
    return 0 if all(r.passed for r in rows) else 1


# -- parser ------------------------------------------------------------------------


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "-o", "--output", default=None,
        help="write to this file (or into this directory) instead of stdout",
    )


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dgcalc",
        description="exact calculus for linear constant-coefficient "
                    "differential operators",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cc", help="compatibility conditions of an operator")
    p.add_argument("operator")
    _add_output(p)
    p.set_defaults(func=_cmd_cc)

    p = sub.add_parser("adjoint", help="formal adjoint")
    p.add_argument("operator")
    _add_output(p)
    p.set_defaults(func=_cmd_adjoint)

    p = sub.add_parser(
        "compose", help="composition OUTER after INNER"
    )
    p.add_argument("outer")
    p.add_argument("inner")
    _add_output(p)
    p.set_defaults(func=_cmd_compose)

    p = sub.add_parser(
        "resolve",
        help="free resolution of the row module; -o writes step files",
    )
    p.add_argument("operator")
    p.add_argument("--steps", type=int, default=None,
                   help="maximum number of syzygy steps")
    p.add_argument("--threads", type=int, default=1)
    _add_output(p)
    p.set_defaults(func=_cmd_resolve)

    p = sub.add_parser("rank", help="generic rank of the operator matrix")
    p.add_argument("operator")
    _add_output(p)
    p.set_defaults(func=_cmd_rank)

    p = sub.add_parser(
        "paramtest",
        help="double-duality parametrizability test with torsion report",
    )
    p.add_argument("operator")
    _add_output(p)
    p.set_defaults(func=_cmd_paramtest)

    p = sub.add_parser(
        "minparam", help="parametrization with rank-many potentials"
    )
    p.add_argument("operator")
    _add_output(p)
    p.set_defaults(func=_cmd_minparam)

    p = sub.add_parser("ext", help="Ext module of the adjoint system")
    p.add_argument("operator")
    p.add_argument("index", type=int)
    _add_output(p)
    p.set_defaults(func=_cmd_ext)

    p = sub.add_parser(
        "factor",
        help="find Q with LEFT = compose(Q, THROUGH)",
    )
    p.add_argument("left")
    p.add_argument("through")
    _add_output(p)
    p.set_defaults(func=_cmd_factor)

    p = sub.add_parser(
        "zoo", help="list the operator zoo, or build one entry"
    )
    p.add_argument("name", nargs="?", default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--metric", choices=sorted(zoo.METRICS),
                   default="euclidean")
    p.add_argument("--lam", default="1",
                   help="first elastic modulus (rational, e.g. 3/2)")
    p.add_argument("--mu", default="1",
                   help="second elastic modulus (rational)")
    p.add_argument("--r", type=int, default=0,
                   help="form degree for exterior_derivative")
    _add_output(p)
    p.set_defaults(func=_cmd_zoo)

    p = sub.add_parser(
        "report",
        help="recompute every recorded claim and compare",
    )
    p.add_argument("--only", default=None,
                   help="run only checks whose id contains this substring")
    p.add_argument("--json", action="store_true",
                   help="print the stable JSON document instead of text")
    _add_output(p)
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return args.func(args)
    except NotFactorable as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FACTOR
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ShapeMismatch as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SHAPE
    except (OpFormatError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (TorsionWitnessError, SearchBudgetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (KeyError, ValueError, OSError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
