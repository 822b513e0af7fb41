"""Rendering of syntax trees.

`render_path` / `render_query` / `render_module` produce source text
that reparses to a structurally identical tree.  `ast_dump` produces a
stable indented outline for the CLI's parse command.
"""

from __future__ import annotations

from ..values import render_literal
from .nodes import (Aggregate, Arith, Bind, Block, Call, Classify, CollDef,
                    CollRef, Compare, CurRef, Dot, Entities, ExternalDef,
                    FieldAccess, FuncDef, Import, Literal, Module,
                    OptionalPath, ParamsRef, Predicate, Prohibit, RecordCtor,
                    Require, RootRef, Roots, TuplePath, VarDef, VarRef, Where)

# Precedence levels used to decide parenthesization.
_PREC_COMPARE = 1
_PREC_ADD = 2
_PREC_MUL = 3
_PREC_DOT = 4
_PREC_POSTFIX = 5
_PREC_ATOM = 6


def render_path(expr) -> str:
    """Source text for a path; reparses to an equal tree."""
    return _render(expr, _PREC_COMPARE)


def _paren(text: str, prec: int, required: int) -> str:
    return "(%s)" % text if prec < required else text


def _render(expr, required: int) -> str:
    text, prec = _render_prec(expr)
    return _paren(text, prec, required)


def _render_prec(expr) -> tuple[str, int]:
    if isinstance(expr, Entities):
        return "@entities", _PREC_ATOM
    if isinstance(expr, Roots):
        return "@roots", _PREC_ATOM
    if isinstance(expr, Literal):
        return render_literal(expr.value), _PREC_ATOM
    if isinstance(expr, Predicate):
        return ("!" if expr.reverse else "") + expr.label, _PREC_ATOM
    if isinstance(expr, CurRef):
        return "?cur", _PREC_ATOM
    if isinstance(expr, RootRef):
        return "?root", _PREC_ATOM
    if isinstance(expr, ParamsRef):
        return "?params", _PREC_ATOM
    if isinstance(expr, VarRef):
        return "?" + expr.name, _PREC_ATOM
    if isinstance(expr, CollRef):
        return "$" + expr.name, _PREC_ATOM
    if isinstance(expr, Dot):
        left = _render(expr.left, _PREC_DOT)
        right = _render(expr.right, _PREC_DOT + 1)
        return "%s.%s" % (left, right), _PREC_DOT
    if isinstance(expr, Bind):
        return "%s.bind(?%s)" % (_render(expr.body, _PREC_DOT), expr.name), _PREC_DOT
    if isinstance(expr, FieldAccess):
        base = _render(expr.base, _PREC_ATOM)
        return base + "".join("->" + n for n in expr.names), _PREC_POSTFIX
    if isinstance(expr, Compare):
        return "%s == %s" % (_render(expr.left, _PREC_ADD),
                             _render(expr.right, _PREC_ADD)), _PREC_COMPARE
    if isinstance(expr, Arith):
        if expr.op in "+-":
            mine, left_req, right_req = _PREC_ADD, _PREC_ADD, _PREC_MUL
        else:
            mine, left_req, right_req = _PREC_MUL, _PREC_MUL, _PREC_DOT
        return "%s %s %s" % (_render(expr.left, left_req), expr.op,
                             _render(expr.right, right_req)), mine
    if isinstance(expr, Where):
        return "[%s]" % render_path(expr.body), _PREC_ATOM
    if isinstance(expr, Require):
        return "require(%s)" % render_path(expr.body), _PREC_ATOM
    if isinstance(expr, Prohibit):
        return "prohibit(%s)" % render_path(expr.body), _PREC_ATOM
    if isinstance(expr, OptionalPath):
        return "optional(%s)" % render_path(expr.body), _PREC_ATOM
    if isinstance(expr, TuplePath):
        return "(%s)" % ", ".join(render_path(b) for b in expr.branches), _PREC_ATOM
    if isinstance(expr, Block):
        return "{ %s }" % "; ".join(_render_element(e) for e in expr.elements), _PREC_ATOM
    if isinstance(expr, RecordCtor):
        parts = []
        for f in expr.fields:
            prefix = "require " if f.required else ""
            parts.append("%s%s: %s" % (prefix, f.name, render_path(f.value)))
        return "{ %s }" % " ".join(parts), _PREC_ATOM
    if isinstance(expr, Classify):
        parts = []
        for cond, body in expr.cases:
            parts.append("%s: %s" % (render_path(cond), render_path(body)))
        if expr.default is not None:
            parts.append("else: %s" % render_path(expr.default))
        return "classify { %s }" % " ".join(parts), _PREC_ATOM
    if isinstance(expr, Call):
        ns = expr.namespace + "::" if expr.namespace else ""
        args = ", ".join(render_path(a) for a in expr.args)
        return "%s%s(%s)" % (ns, expr.name, args), _PREC_ATOM
    if isinstance(expr, Aggregate):
        parts = [render_path(a) for a in expr.args]
        for key in expr.keys:
            parts.append(("-" if key.descending else "") + render_path(key.path))
        return "%s(%s)" % (expr.kind, ", ".join(parts)), _PREC_ATOM
    raise TypeError("cannot render: %r" % (expr,))


def _render_element(el) -> str:
    if isinstance(el, VarDef):
        return "def ?%s %s" % (el.name, render_path(el.path))
    if isinstance(el, CollDef):
        prefix = "require def" if el.required else "def"
        return "%s $%s %s" % (prefix, el.name, render_path(el.path))
    if isinstance(el, FuncDef):
        return render_definition(el)
    return render_path(el)


def render_definition(d) -> str:
    if isinstance(d, ExternalDef):
        params = ", ".join(_render_param(p) for p in d.params)
        expr_kw = "expr " if d.expr_keyword else ""
        return "external def %s%s(%s) implemented_by '%s'" % (
            expr_kw, d.name, params, d.implemented_by)
    marker = ""
    if d.kind == "base":
        marker = "base "
    elif d.kind == "recur":
        marker = "recur<%d> " % d.bound
    params = ", ".join(_render_param(p) for p in d.params)
    return "def %s%s(%s) %s" % (marker, d.name, params, render_path(d.body))


def _render_param(p) -> str:
    return ("?" if p.kind == "var" else "$") + p.name


def _render_import(imp: Import) -> str:
    if imp.alias:
        return "import '%s' into %s" % (imp.path, imp.alias)
    return "import '%s'" % imp.path


def render_query(imports, definitions, root) -> str:
    lines = [_render_import(i) for i in imports]
    lines.extend(render_definition(d) for d in definitions)
    lines.append(render_path(root))
    return "\n".join(lines) + "\n"


def render_module(module: Module) -> str:
    lines = [_render_import(i) for i in module.imports]
    lines.extend(render_definition(d) for d in module.definitions)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Indented structural dump
# ---------------------------------------------------------------------------

def ast_dump(node) -> str:
    """Stable indented outline of a tree, one node per line."""
    lines: list[str] = []
    _dump(node, 0, lines)
    return "\n".join(lines)


def _line(lines: list[str], depth: int, text: str) -> None:
    lines.append("  " * depth + text)


def _dump(node, depth: int, lines: list[str]) -> None:
    if isinstance(node, Entities):
        _line(lines, depth, "Entities")
    elif isinstance(node, Roots):
        _line(lines, depth, "Roots")
    elif isinstance(node, Literal):
        _line(lines, depth, "Literal %s" % render_literal(node.value).replace("\n", " "))
    elif isinstance(node, Predicate):
        _line(lines, depth, "Predicate %s %s" % (node.label, "rev" if node.reverse else "fwd"))
    elif isinstance(node, Dot):
        _line(lines, depth, "Dot")
        _dump(node.left, depth + 1, lines)
        _dump(node.right, depth + 1, lines)
    elif isinstance(node, Where):
        _line(lines, depth, "Where")
        _dump(node.body, depth + 1, lines)
    elif isinstance(node, Require):
        _line(lines, depth, "Require")
        _dump(node.body, depth + 1, lines)
    elif isinstance(node, Prohibit):
        _line(lines, depth, "Prohibit")
        _dump(node.body, depth + 1, lines)
    elif isinstance(node, OptionalPath):
        _line(lines, depth, "Optional")
        _dump(node.body, depth + 1, lines)
    elif isinstance(node, TuplePath):
        _line(lines, depth, "Tuple")
        for b in node.branches:
            _dump(b, depth + 1, lines)
    elif isinstance(node, Block):
        _line(lines, depth, "Block")
        for el in node.elements:
            _dump(el, depth + 1, lines)
    elif isinstance(node, Classify):
        _line(lines, depth, "Classify")
        for cond, body in node.cases:
            _line(lines, depth + 1, "Case")
            _dump(cond, depth + 2, lines)
            _dump(body, depth + 2, lines)
        if node.default is not None:
            _line(lines, depth + 1, "Else")
            _dump(node.default, depth + 2, lines)
    elif isinstance(node, RecordCtor):
        _line(lines, depth, "Record")
        for f in node.fields:
            flags = []
            if f.required:
                flags.append("require")
            if f.merge:
                flags.append("merge")
            suffix = (" [" + " ".join(flags) + "]") if flags else ""
            _line(lines, depth + 1, "Field %s%s" % (f.name, suffix))
            _dump(f.value, depth + 2, lines)
    elif isinstance(node, FieldAccess):
        _line(lines, depth, "FieldAccess " + "->".join(node.names))
        _dump(node.base, depth + 1, lines)
    elif isinstance(node, Compare):
        _line(lines, depth, "Compare ==")
        _dump(node.left, depth + 1, lines)
        _dump(node.right, depth + 1, lines)
    elif isinstance(node, Arith):
        _line(lines, depth, "Arith %s" % node.op)
        _dump(node.left, depth + 1, lines)
        _dump(node.right, depth + 1, lines)
    elif isinstance(node, Bind):
        _line(lines, depth, "Bind ?%s" % node.name)
        _dump(node.body, depth + 1, lines)
    elif isinstance(node, VarRef):
        _line(lines, depth, "Var ?%s" % node.name)
    elif isinstance(node, CurRef):
        _line(lines, depth, "Var ?cur")
    elif isinstance(node, RootRef):
        _line(lines, depth, "Var ?root")
    elif isinstance(node, ParamsRef):
        _line(lines, depth, "Var ?params")
    elif isinstance(node, CollRef):
        _line(lines, depth, "Collection $%s" % node.name)
    elif isinstance(node, Call):
        ns = node.namespace + "::" if node.namespace else ""
        _line(lines, depth, "Call %s%s" % (ns, node.name))
        for a in node.args:
            _dump(a, depth + 1, lines)
    elif isinstance(node, Aggregate):
        _line(lines, depth, "Aggregate %s" % node.kind)
        for a in node.args:
            _dump(a, depth + 1, lines)
        for key in node.keys:
            _line(lines, depth + 1, "Key%s" % (" desc" if key.descending else ""))
            _dump(key.path, depth + 2, lines)
    elif isinstance(node, VarDef):
        _line(lines, depth, "VarDef ?%s" % node.name)
        _dump(node.path, depth + 1, lines)
    elif isinstance(node, CollDef):
        _line(lines, depth, "CollDef $%s%s" % (node.name, " [require]" if node.required else ""))
        _dump(node.path, depth + 1, lines)
    elif isinstance(node, FuncDef):
        marker = node.kind if node.kind != "plain" else "def"
        if node.kind == "recur":
            marker = "recur<%d>" % node.bound
        params = ", ".join(_render_param(p) for p in node.params)
        _line(lines, depth, "FuncDef %s %s(%s)" % (marker, node.name, params))
        _dump(node.body, depth + 1, lines)
    elif isinstance(node, ExternalDef):
        params = ", ".join(_render_param(p) for p in node.params)
        _line(lines, depth, "ExternalDef %s(%s) implemented_by '%s'"
              % (node.name, params, node.implemented_by))
    elif isinstance(node, Import):
        alias = " into %s" % node.alias if node.alias else ""
        _line(lines, depth, "Import '%s'%s" % (node.path, alias))
    else:
        raise TypeError("cannot dump: %r" % (node,))
