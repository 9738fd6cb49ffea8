"""Command-line front end.

Exit status: 0 when the answer is yes (or the command succeeded), 1 when it
is no, 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Sequence

from srpa._text import ParseError
from srpa.automaton import PaError, check_structure, load, membership, require_state, save
from srpa.equiv import format_atom, pa_atoms
from srpa.expr import lang_up_to, parse_expr
from srpa.kleene import compile_exprs, expr_equiv, extract
from srpa.oracle import MAX_EVENTS, oracle_equiv
from srpa.pomset import format_pomset, parse_pomset
from srpa.wellstruct import well_structure

EXIT_TRUE, EXIT_FALSE, EXIT_ERROR = 0, 1, 2


class CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse exits with 2 already; keep the message terse
        self.print_usage(sys.stderr)
        raise CliError(message)


def _bound(text: str) -> int:
    n = int(text)
    if not 0 <= n <= MAX_EVENTS:
        raise argparse.ArgumentTypeError(f"must be between 0 and {MAX_EVENTS}")
    return n


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="srpa", description="Series-rational expressions and pomset automata.")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("equiv", help="decide whether two expressions are equivalent")
    s.add_argument("left")
    s.add_argument("right")
    s.add_argument("--oracle", type=_bound, metavar="N", help="also compare languages up to N events")

    s = sub.add_parser("member", help="decide whether a pomset is accepted")
    src = s.add_mutually_exclusive_group(required=True)
    src.add_argument("--expr", metavar="E")
    src.add_argument("--pa", metavar="FILE")
    s.add_argument("--state", metavar="Q")
    s.add_argument("pomset")

    s = sub.add_parser("compile", help="build the derivative automaton of an expression")
    s.add_argument("expr")
    s.add_argument("-o", "--output", required=True, metavar="FILE")

    s = sub.add_parser("extract", help="expression for the language of a state")
    s.add_argument("file")
    s.add_argument("--state", required=True, metavar="Q")

    s = sub.add_parser("atoms", help="list the atoms of a well-structured automaton")
    s.add_argument("file")

    s = sub.add_parser("normalize", help="make an automaton well-structured")
    s.add_argument("file")
    s.add_argument("-o", "--output", required=True, metavar="FILE")
    s.add_argument("--track", metavar="Q,...", help="states whose languages must be kept (default: all)")

    s = sub.add_parser("check", help="report structural properties")
    s.add_argument("file")

    s = sub.add_parser("lang", help="list the pomsets of an expression up to a size")
    s.add_argument("expr")
    s.add_argument("--max-size", type=_bound, required=True, metavar="N")
    return p


# Each handler returns (exit code, human text, result value, details).

def _equiv(args) -> tuple[int, str, Any, dict]:
    e, f = parse_expr(args.left), parse_expr(args.right)
    decided = expr_equiv(e, f)
    details: dict = {}
    if args.oracle is not None:
        bounded = oracle_equiv(e, f, args.oracle)
        details["oracle_bound"] = args.oracle
        details["oracle_equal"] = bounded
        if decided and not bounded:
            raise CliError(
                f"decision says equivalent but languages differ within {args.oracle} events"
            )
    text = "equivalent" if decided else "not equivalent"
    return (EXIT_TRUE if decided else EXIT_FALSE), text, decided, details


def _member(args) -> tuple[int, str, Any, dict]:
    u = parse_pomset(args.pomset)
    if args.expr is not None:
        if args.state is not None:
            raise CliError("--state only applies with --pa")
        e = parse_expr(args.expr)
        pa, states = compile_exprs([e])
        q = states[e]
    else:
        if args.state is None:
            raise CliError("--pa needs --state")
        pa = load(args.pa)
        q = args.state
        require_state(pa, q)
    accepted = membership(pa, q, u)
    text = "member" if accepted else "not a member"
    return (EXIT_TRUE if accepted else EXIT_FALSE), text, accepted, {"pomset": format_pomset(u)}


def _compile(args) -> tuple[int, str, Any, dict]:
    e = parse_expr(args.expr)
    pa, states = compile_exprs([e])
    save(pa, args.output)
    details = {"states": len(pa.states), "root": states[e], "output": args.output}
    return EXIT_TRUE, f"wrote {len(pa.states)} states to {args.output}; root state {states[e]!r}", states[e], details


def _extract(args) -> tuple[int, str, Any, dict]:
    pa = load(args.file)
    text = str(extract(pa, args.state))
    return EXIT_TRUE, text, text, {}


def _atoms(args) -> tuple[int, str, Any, dict]:
    pa = load(args.file)
    members = {r for _, fork, _ in pa.all_forks() for r in fork.distinct()}
    atoms = sorted(pa_atoms(pa), key=lambda a: (len(a), sorted(a)))
    lines = []
    rows = []
    for alpha in atoms:
        flagged = bool(alpha & members)
        lines.append(format_atom(alpha) + ("  [fork member]" if flagged else ""))
        rows.append({"members": sorted(alpha), "fork_member": flagged})
    return EXIT_TRUE, "\n".join(lines), rows, {"count": len(atoms)}


def _normalize(args) -> tuple[int, str, Any, dict]:
    pa = load(args.file)
    tracked = sorted(pa.states) if args.track is None else [q.strip() for q in args.track.split(",") if q.strip()]
    if not tracked:
        raise CliError("--track needs at least one state")
    out, _ = well_structure(pa, tracked)
    save(out, args.output)
    details = {"states": len(out.states), "tracked": tracked, "output": args.output}
    return EXIT_TRUE, f"wrote {len(out.states)} states to {args.output}", True, details


def _check(args) -> tuple[int, str, Any, dict]:
    pa = load(args.file)
    report = check_structure(pa).as_dict()
    text = "\n".join(f"{k.replace('_', '-')}={json.dumps(v)}" for k, v in report.items())
    ok = report["well_structured"]
    return (EXIT_TRUE if ok else EXIT_FALSE), text, ok, report


def _lang(args) -> tuple[int, str, Any, dict]:
    e = parse_expr(args.expr)
    words = sorted(lang_up_to(e, args.max_size), key=lambda u: (u.size, u.sort_key))
    texts = [format_pomset(u) for u in words]
    return EXIT_TRUE, "\n".join(texts), texts, {"count": len(texts)}


_HANDLERS = {
    "equiv": _equiv,
    "member": _member,
    "compile": _compile,
    "extract": _extract,
    "atoms": _atoms,
    "normalize": _normalize,
    "check": _check,
    "lang": _lang,
}


def _inputs(args) -> dict:
    skip = {"json", "command"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    as_json = "--json" in (sys.argv[1:] if argv is None else argv)
    try:
        args = parser.parse_args(argv)
        code, text, result, details = _HANDLERS[args.command](args)
    except (CliError, ParseError, PaError, OSError, ValueError) as exc:
        if as_json:
            print(json.dumps({"error": str(exc)}))
        else:
            print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if args.json:
        print(json.dumps({"command": args.command, "inputs": _inputs(args), "result": result, "details": details}))
    elif text:
        print(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
