"""Command-line front end: run queries, dump parse trees, interactive REPL.

Text output prints one `<root literal>: <value literal>` line per result
pair (records span multiple indented lines) followed by a total line.
Because composition may reorder values, text mode sorts result pairs by
root then output for reproducibility; json mode preserves evaluator
order.
"""

from __future__ import annotations

import argparse
import functools
import json
import runpy
import sys
from pathlib import Path

from .errors import EvalError, PathQueryError
from .evaluator import QueryResult, eval_query
from .graph import Graph, load_graph
from .stdlib import ExternalFunctionRegistry, default_registry
from .syntax import (FileModuleLoader, ast_dump, link_query, parse_module,
                     parse_query, parse_value_literal)
from .values import Record, Value, compare, render_literal, to_json_obj


def main(argv: list[str] | None = None) -> int:
    parser = _build_arg_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except PathQueryError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    except OSError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1


def _build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pathquery",
        description="Run PathQuery queries over an in-memory triple graph.")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="evaluate a query over a graph")
    run_p.add_argument("--graph", required=True, help="PQT triple file")
    query_group = run_p.add_mutually_exclusive_group(required=True)
    query_group.add_argument("--query", help="query file (.pq)")
    query_group.add_argument("--query-string", help="inline query text")
    run_p.add_argument("--params", help="file holding one record literal")
    run_p.add_argument("--roots", help="file with one node literal per line")
    run_p.add_argument("--module-path", action="append", default=[],
                       help="directory searched for imported modules (repeatable)")
    run_p.add_argument("--format", choices=("text", "json"), default="text")
    run_p.add_argument("--limit", type=int, default=None,
                       help="print at most this many result pairs")
    run_p.add_argument("--externals",
                       help="python file with register(registry) for host functions")
    run_p.set_defaults(handler=cmd_run)

    parse_p = sub.add_parser("parse", help="parse a query or module and dump the tree")
    parse_group = parse_p.add_mutually_exclusive_group(required=True)
    parse_group.add_argument("--query", help="query file (.pq)")
    parse_group.add_argument("--query-string", help="inline query text")
    parse_p.add_argument("--module", action="store_true",
                         help="treat the input as a module file")
    parse_p.set_defaults(handler=cmd_parse)

    repl_p = sub.add_parser("repl", help="interactive query session")
    repl_p.add_argument("--graph", required=True, help="PQT triple file")
    repl_p.add_argument("--module-path", action="append", default=[])
    repl_p.add_argument("--externals",
                        help="python file with register(registry) for host functions")
    repl_p.set_defaults(handler=cmd_repl)
    return parser


def _load_externals(path: str | None) -> ExternalFunctionRegistry:
    registry = default_registry
    if path:
        namespace = runpy.run_path(path)
        register = namespace.get("register")
        if not callable(register):
            raise EvalError("externals file %s defines no register(registry)" % path)
        register(registry)
    return registry


def _read_params(path: str | None) -> Record | None:
    if not path:
        return None
    value = parse_value_literal(Path(path).read_text(encoding="utf-8").strip(),
                                filename=path)
    if not isinstance(value, Record):
        raise EvalError("params file must hold a single record literal: %s" % path)
    return value


def _read_roots(path: str | None) -> list[Value] | None:
    if not path:
        return None
    roots = []
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        roots.append(parse_value_literal(line, filename=path))
    return roots


def _pair_sort_key():
    def cmp(a, b):
        c = compare(a[0], b[0])
        return c if c else compare(a[1], b[1])
    return functools.cmp_to_key(cmp)


def _print_text(pairs, total: int, out) -> None:
    for root, value in pairs:
        out.write("%s: %s\n" % (render_literal(root), render_literal(value)))
    out.write("(total results: %d)\n" % total)


def _print_json(pairs, out) -> None:
    payload = [{"root": to_json_obj(root), "value": to_json_obj(value)}
               for root, value in pairs]
    json.dump(payload, out, indent=2)
    out.write("\n")


def _render_result(result: QueryResult, fmt: str, limit: int | None, out) -> None:
    pairs = list(result.pairs)
    if fmt == "text":
        pairs.sort(key=_pair_sort_key())
    if limit is not None:
        pairs = pairs[:limit]
    if fmt == "text":
        _print_text(pairs, result.total, out)
    else:
        _print_json(pairs, out)


def _query_source(args) -> tuple[str, str | None]:
    if args.query:
        return Path(args.query).read_text(encoding="utf-8"), args.query
    return args.query_string, None


def cmd_run(args) -> int:
    registry = _load_externals(args.externals)
    graph = load_graph(Path(args.graph).read_text(encoding="utf-8"),
                       filename=args.graph)
    source, filename = _query_source(args)
    loader = FileModuleLoader(args.module_path)
    program = link_query(source, loader=loader, registry=registry,
                         filename=filename)
    params = _read_params(args.params)
    roots = _read_roots(args.roots)
    result = eval_query(program, graph, params=params, roots=roots)
    _render_result(result, args.format, args.limit, sys.stdout)
    return 0


def cmd_parse(args) -> int:
    source, filename = _query_source(args)
    if args.module:
        module = parse_module(source, filename or "<module>", filename=filename)
        lines = [ast_dump(i) for i in module.imports]
        lines.extend(ast_dump(d) for d in module.definitions)
        print("\n".join(lines))
    else:
        imports, defs, root = parse_query(source, filename=filename)
        lines = [ast_dump(i) for i in imports]
        lines.extend(ast_dump(d) for d in defs)
        lines.append(ast_dump(root))
        print("\n".join(lines))
    return 0


def _read_block(prompt: str) -> list[str] | None:
    """Read lines until a blank line; None on EOF with nothing read."""
    lines: list[str] = []
    interactive = sys.stdin.isatty()
    while True:
        if interactive:
            sys.stderr.write(prompt if not lines else "...> ")
            sys.stderr.flush()
        line = sys.stdin.readline()
        if not line:
            return lines or None
        if not line.strip():
            if lines:
                return lines
            continue
        lines.append(line.rstrip("\n"))


def cmd_repl(args) -> int:
    registry = _load_externals(args.externals)
    graph = load_graph(Path(args.graph).read_text(encoding="utf-8"),
                       filename=args.graph)
    loader = FileModuleLoader(args.module_path)
    params: Record | None = None
    while True:
        lines = _read_block("pq> ")
        if lines is None:
            return 0
        text = "\n".join(lines).strip()
        if text == ":quit":
            return 0
        try:
            if text.startswith(":params"):
                value = parse_value_literal(text[len(":params"):].strip())
                if not isinstance(value, Record):
                    raise EvalError(":params takes a record literal")
                params = value
                print("params set")
                continue
            if text.startswith(":"):
                raise EvalError("unknown command %s (try :params or :quit)"
                                % text.split()[0])
            program = link_query(text, loader=loader, registry=registry)
            result = eval_query(program, graph, params=params)
            _render_result(result, "text", None, sys.stdout)
        except PathQueryError as exc:
            print("error: %s" % exc)


if __name__ == "__main__":
    sys.exit(main())
