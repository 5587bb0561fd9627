"""Command-line frontend.

    trace-kit <command> [--bound N] [--seed N] [--instances N]
              [--suite NAME] [--format json|pretty] <files...>

Commands: lefschetz, transfer, reidemeister, rep-trace, hattori-stallings,
matrix (trace|total|transfer|verify), verify, generate.

Exit codes: 0 success, 1 verification failure (including any internal
two-route disagreement), 2 malformed input.  Output documents contain
exact integers only; formal sums are {"label": coefficient} objects.
Reports are byte-identical for identical (inputs, flags, seed); timing
goes to stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

from .errors import ConsistencyError, InputError
from .formal import FormalSum
from .fixpt import (
    lefschetz,
    reidemeister_trace,
    rt_augment,
    rt_project_pi0,
    transfer,
)
from .gpdrep import hocolim_endo, rep_total_trace
from .chain import lefschetz_trace
from .matbicat import (
    fam_fib_trace,
    fam_tot_trace,
    gr_augment_matrix,
    hattori_stallings,
    set_transfer,
    verify_fibtrace4,
    verify_totaltr,
)
from .intlinalg import trace as int_trace
from .inputdoc import load_document
from .generate import KINDS, generate_instance
from .verify import SUITES, run_suites

DEFAULT_BOUND = 8


def _default_bound() -> int:
    env = os.environ.get("TRACE_KIT_BOUND")
    if env is None:
        return DEFAULT_BOUND
    try:
        value = int(env)
    except ValueError:
        raise InputError(f"TRACE_KIT_BOUND must be an integer, got {env!r}")
    if value < 1:
        raise InputError("TRACE_KIT_BOUND must be positive")
    return value


def _require(parsed, attr, command):
    value = getattr(parsed, attr)
    if value is None:
        raise InputError(f"command {command!r} needs a {attr!r} block in the input document")
    return value


def _classification_doc(rt) -> dict:
    from .fixpt import Bounded
    if isinstance(rt.classification, Bounded):
        return {
            "kind": "bounded",
            "bound": rt.classification.bound,
            "unresolved": [[str(a), str(b)] for a, b in rt.classification.unresolved],
        }
    return {"kind": "exact"}


def run_command(args) -> tuple:
    """Execute one command; returns (exit code, output document)."""
    command = args.command
    bound = args.bound if args.bound is not None else _default_bound()
    if bound < 1:
        raise InputError("--bound must be positive")

    if command == "verify":
        report = run_suites(args.suite, args.instances, args.seed, bound)
        return (0 if report["ok"] else 1), report

    if command == "generate":
        doc = generate_instance(args.kind, args.seed)
        return 0, doc

    if command == "matrix":
        return _run_matrix(args, bound)

    if not args.files:
        raise InputError(f"command {command!r} needs an input file")
    out = {"command": command}
    code = 0
    for path in args.files:
        parsed = load_document(path)
        if command == "lefschetz":
            endo = _require(parsed, "endo", command)
            out["lefschetz"] = lefschetz(endo)
        elif command == "transfer":
            endo = _require(parsed, "endo", command)
            out["transfer"] = transfer(endo).to_dict()
        elif command == "reidemeister":
            endo = _require(parsed, "endo", command)
            rt = reidemeister_trace(endo, bound)
            out["reidemeister"] = {
                "terms": rt.terms.to_dict(),
                "raw_terms": [[c, str(w)] for c, w in rt.raw_terms],
                "classification": _classification_doc(rt),
                "augmentation": rt_augment(rt),
                "pi0_projection": rt_project_pi0(rt).to_dict(),
            }
        elif command == "rep-trace":
            rep = _require(parsed, "rep", command)
            endo = _require(parsed, "rep_endo", command)
            total = rep_total_trace(rep, endo)
            out["rep_trace"] = total.to_dict()
            out["hocolim_lefschetz"] = lefschetz_trace(hocolim_endo(rep, endo))
        elif command == "hattori-stallings":
            group = _require(parsed, "group", command)
            mat = _require(parsed, "group_matrix", command)
            hs = hattori_stallings(group, mat)
            out["hattori_stallings"] = hs.to_dict()
            out["augmented_trace"] = int_trace(gr_augment_matrix(mat))
        else:
            raise InputError(f"unknown command {command!r}")
    return code, out


def _run_matrix(args, bound) -> tuple:
    if not args.files:
        raise InputError("matrix commands need an input file")
    sub = args.subcommand
    out = {"command": f"matrix {sub}"}
    code = 0
    for path in args.files:
        parsed = load_document(path)
        if sub == "transfer":
            fs = _require(parsed, "finite_set", "matrix transfer")
            mapping = _require(parsed, "set_map", "matrix transfer")
            out["set_transfer"] = set_transfer(fs, mapping).to_dict()
            continue
        fam = _require(parsed, "family", f"matrix {sub}")
        mats = _require(parsed, "family_endo", f"matrix {sub}")
        if sub == "trace":
            traces, _ = fam_fib_trace(fam, mats)
            out["fiberwise_traces"] = {a: t for a, t in zip(fam.index.labels, traces)}
        elif sub == "total":
            out["total_trace"] = fam_tot_trace(fam, mats).to_dict()
        elif sub == "verify":
            r1 = verify_fibtrace4(fam, mats)
            r2 = verify_totaltr(fam, mats)
            out["fibtrace_square"] = {
                "passed": r1.passed, "lhs": r1.lhs, "rhs": r1.rhs, "witness": r1.witness,
            }
            out["total_triangle"] = {
                "passed": r2.passed, "lhs": r2.lhs, "rhs": r2.rhs, "witness": r2.witness,
            }
            if not (r1.passed and r2.passed):
                code = 1
        else:
            raise InputError(f"unknown matrix subcommand {sub!r}")
    return code, out


def _render(doc, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(doc, sort_keys=True, indent=2)
    return _render_pretty(doc, 0)


def _render_pretty(doc, depth: int) -> str:
    pad = "  " * depth
    if isinstance(doc, dict):
        lines = []
        for key, value in doc.items():
            if isinstance(value, (dict, list)) and value:
                lines.append(f"{pad}{key}:")
                lines.append(_render_pretty(value, depth + 1))
            else:
                lines.append(f"{pad}{key}: {_render_pretty(value, 0) if isinstance(value, (dict, list)) else value}")
        return "\n".join(lines)
    if isinstance(doc, list):
        return "\n".join(f"{pad}- {json.dumps(item, sort_keys=True)}" for item in doc)
    return f"{pad}{doc}"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trace-kit",
        description="Exact fixed-point invariants of graph self-maps, with "
                    "two-route verification.",
    )
    parser.add_argument("--format", choices=("json", "pretty"), default="json")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, files=True):
        p.add_argument("--bound", type=int, default=None,
                       help="twisted witness search bound (default 8, env TRACE_KIT_BOUND)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--instances", type=int, default=50)
        if files:
            p.add_argument("files", nargs="*")

    for name in ("lefschetz", "transfer", "reidemeister", "rep-trace", "hattori-stallings"):
        common(sub.add_parser(name))

    matrix = sub.add_parser("matrix")
    matrix.add_argument("subcommand", choices=("trace", "total", "transfer", "verify"))
    common(matrix)

    verify = sub.add_parser("verify")
    verify.add_argument("--suite", default="all", choices=("all",) + SUITES)
    common(verify, files=False)

    generate = sub.add_parser("generate")
    generate.add_argument("kind", choices=KINDS)
    common(generate, files=False)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.monotonic()
    try:
        code, doc = run_command(args)
    except InputError as exc:
        print(json.dumps({"error": str(exc), "field": exc.field}, sort_keys=True),
              file=sys.stdout)
        return 2
    except ConsistencyError as exc:
        print(json.dumps({"error": f"internal two-route disagreement: {exc}"},
                         sort_keys=True), file=sys.stdout)
        return 1
    sys.stdout.write(_render(doc, args.format) + "\n")
    print(f"elapsed: {time.monotonic() - started:.3f}s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
