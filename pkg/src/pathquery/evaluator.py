"""Bag-semantics evaluation of linked programs over a graph.

A path is a function from collections to collections.  Collections are
bags of FlowItems: a value plus its root provenance and an environment
of variable/collection bindings and the `?cur` stack.  Evaluation starts
from a single unit item; the first source path reached (entities, roots,
or a literal) stamps each emitted value as its own root, and the result
maps roots to final output values.

Scoping: `bind` attaches to the flowing item and survives until the
innermost enclosing function returns (or to the end of the query);
`def` variables and collections are block-scoped; functions see only
their parameters plus the global `?params` and `?root`.
"""

from __future__ import annotations

import functools
import itertools
import math
from typing import Iterable, NamedTuple, Optional

from .errors import EvalError
from .graph import Graph
from .stdlib import ExternalFunctionRegistry
from .syntax.linker import FunctionEntry, Program
from .syntax.nodes import (Aggregate, Arith, Bind, Block, Call, Classify,
                           CollDef, CollRef, Compare, CurRef, Dot, Entities,
                           FieldAccess, FuncDef, KeySpec, Literal,
                           OptionalPath, ParamsRef, Predicate, Prohibit,
                           RecordCtor, Require, RootRef, Roots, TuplePath,
                           VarDef, VarRef, Where)
from .values import (Bool, Double, INT_MAX, INT_MIN, Int, Record, VALUE_TYPES,
                     Value, compare, equals, is_truthy)

_EMPTY_MAP: dict = {}


class Env:
    """Immutable binding environment; mutating helpers return a new Env."""

    __slots__ = ("vars", "colls", "cur")

    def __init__(self, vars=_EMPTY_MAP, colls=_EMPTY_MAP, cur=()):
        self.vars = vars
        self.colls = colls
        self.cur = cur

    def bind_var(self, name: str, value: Value) -> "Env":
        new_vars = dict(self.vars)
        new_vars[name] = value
        return Env(new_vars, self.colls, self.cur)

    def bind_coll(self, name: str, values: tuple) -> "Env":
        new_colls = dict(self.colls)
        new_colls[name] = values
        return Env(self.vars, new_colls, self.cur)

    def push_cur(self, value) -> "Env":
        return Env(self.vars, self.colls, self.cur + (value,))

    def with_cur(self, cur: tuple) -> "Env":
        return Env(self.vars, self.colls, cur)


EMPTY_ENV = Env()


class FlowItem(NamedTuple):
    value: object  # Value, or None for the initial unit input
    root: object   # Value, or None before any source path ran
    env: Env


class QueryResult:
    """Multiset of (root, output) pairs, in evaluation order."""

    def __init__(self, pairs: list[tuple[Value, Value]]):
        self.pairs = pairs

    @property
    def total(self) -> int:
        return len(self.pairs)

    def outputs(self) -> list[Value]:
        return [value for _, value in self.pairs]

    def roots(self) -> list[Value]:
        seen: dict[Value, None] = {}
        for root, _ in self.pairs:
            seen.setdefault(root, None)
        return list(seen)

    def __iter__(self):
        return iter(self.pairs)

    def __repr__(self) -> str:
        return "QueryResult(%d pairs)" % len(self.pairs)


class _State:
    __slots__ = ("graph", "params", "roots", "depths")

    def __init__(self, graph: Graph, params, roots):
        self.graph = graph
        self.params = params
        self.roots = roots
        self.depths: dict[int, int] = {}  # id(FunctionEntry) -> call depth


def eval_query(program: Program, graph: Graph,
               params: Optional[Record] = None,
               roots: Optional[Iterable[Value]] = None) -> QueryResult:
    """Run a linked program over a graph.

    `params` backs the global `?params` record; `roots` supplies the
    `@roots` source (when absent, `@roots` behaves like `@entities`).
    """
    if params is not None and not isinstance(params, Record):
        raise EvalError("params must be a Record value")
    root_list = None
    if roots is not None:
        root_list = list(roots)
        for r in root_list:
            if isinstance(r, Record) or not isinstance(r, VALUE_TYPES):
                raise EvalError("roots must be non-Record values")
    state = _State(graph, params, root_list)
    outs = _eval(program.root, [FlowItem(None, None, EMPTY_ENV)], state)
    pairs: list[tuple[Value, Value]] = []
    for item in outs:
        if item.value is None:
            raise EvalError("query output is the unit input; start the query"
                            " with a source path")
        root = item.root if item.root is not None else item.value
        if isinstance(root, Record):
            raise EvalError("record values cannot be roots")
        pairs.append((root, item.value))
    return QueryResult(pairs)


def eval_path(path, graph: Graph, inputs: Iterable[Value], *,
              params: Optional[Record] = None,
              roots: Optional[Iterable[Value]] = None,
              loader=None, registry: Optional[ExternalFunctionRegistry] = None,
              ) -> list[Value]:
    """Evaluate one path over explicit input values; returns output values.

    `path` may be query text or an already-parsed expression.  This is
    the operator-level harness: no root bookkeeping, just the path as a
    function from collections to collections.
    """
    if isinstance(path, str):
        from .syntax.linker import link_query
        expr = link_query(path, loader=loader, registry=registry).root
    else:
        expr = path
    state = _State(graph, params, list(roots) if roots is not None else None)
    items = [FlowItem(v, None, EMPTY_ENV) for v in inputs]
    return [o.value for o in _eval(expr, items, state)]


def _pos_text(node) -> str:
    pos = getattr(node, "pos", None)
    return " at %d:%d" % pos if pos else ""


def _root_for(item: FlowItem, value: Value) -> object:
    if item.root is not None:
        return item.root
    if isinstance(value, Record):
        raise EvalError("record values cannot be roots")
    return value


# ---------------------------------------------------------------------------
# Core dispatch
# ---------------------------------------------------------------------------

def _eval(node, items: list[FlowItem], state: _State) -> list[FlowItem]:
    if isinstance(node, Dot):
        return _eval(node.right, _eval(node.left, items, state), state)
    if isinstance(node, Predicate):
        return _eval_predicate(node, items, state)
    if isinstance(node, Literal):
        return [FlowItem(node.value, _root_for(it, node.value), it.env)
                for it in items]
    if isinstance(node, Entities):
        return _eval_source(state.graph.all_entities(), items)
    if isinstance(node, Roots):
        pool = state.roots if state.roots is not None else state.graph.all_entities()
        return _eval_source(pool, items)
    if isinstance(node, Where):
        return _eval_where(node, items, state)
    if isinstance(node, Require):
        return [it for it in items if _eval(node.body, [it], state)]
    if isinstance(node, Prohibit):
        return [it for it in items if not _eval(node.body, [it], state)]
    if isinstance(node, OptionalPath):
        out: list[FlowItem] = []
        for it in items:
            body_out = _eval(node.body, [it], state)
            out.extend(body_out if body_out else [it])
        return out
    if isinstance(node, TuplePath):
        out = []
        for it in items:
            for branch in node.branches:
                out.extend(_eval(branch, [it], state))
        return out
    if isinstance(node, Block):
        return _eval_block(node, items, state)
    if isinstance(node, Classify):
        return _eval_classify(node, items, state)
    if isinstance(node, Compare):
        return _eval_compare(node, items, state)
    if isinstance(node, Arith):
        return _eval_arith(node, items, state)
    if isinstance(node, Aggregate):
        return _eval_aggregate(node, items, state)
    if isinstance(node, RecordCtor):
        return _eval_record(node, items, state)
    if isinstance(node, FieldAccess):
        return _eval_field_access(node, items, state)
    if isinstance(node, Bind):
        body_out = _eval(node.body, items, state)
        return [FlowItem(o.value, o.root, o.env.bind_var(node.name, o.value))
                for o in body_out]
    if isinstance(node, VarRef):
        out = []
        for it in items:
            value = it.env.vars.get(node.name)
            if value is not None:
                out.append(FlowItem(value, it.root, it.env))
        return out
    if isinstance(node, CurRef):
        out = []
        for it in items:
            if it.env.cur and it.env.cur[-1] is not None:
                out.append(FlowItem(it.env.cur[-1], it.root, it.env))
        return out
    if isinstance(node, RootRef):
        return [FlowItem(it.root, it.root, it.env) for it in items
                if it.root is not None]
    if isinstance(node, ParamsRef):
        if state.params is None:
            return []
        return [FlowItem(state.params, it.root, it.env) for it in items]
    if isinstance(node, CollRef):
        out = []
        for it in items:
            for value in it.env.colls.get(node.name, ()):
                out.append(FlowItem(value, it.root, it.env))
        return out
    if isinstance(node, Call):
        return _eval_call(node, items, state)
    raise EvalError("cannot evaluate node %r" % (node,))


def _eval_source(pool: list, items: list[FlowItem]) -> list[FlowItem]:
    out = []
    for it in items:
        for value in pool:
            out.append(FlowItem(value, _root_for(it, value), it.env))
    return out


def _eval_predicate(node: Predicate, items, state) -> list[FlowItem]:
    graph = state.graph
    out = []
    for it in items:
        if it.value is None or isinstance(it.value, Record):
            continue
        if node.reverse:
            neighbors = graph.in_edges(it.value, node.label)
        else:
            neighbors = graph.out_edges(it.value, node.label)
        for value in neighbors:
            out.append(FlowItem(value, it.root, it.env))
    return out


def _eval_where(node: Where, items, state) -> list[FlowItem]:
    out = []
    for it in items:
        probe = FlowItem(it.value, it.root, it.env.push_cur(it.value))
        body_out = _eval(node.body, [probe], state)
        if any(o.value is not None and is_truthy(o.value) for o in body_out):
            out.append(it)
    return out


def _eval_block(node: Block, items, state) -> list[FlowItem]:
    var_names = {el.name for el in node.elements if isinstance(el, VarDef)}
    coll_names = {el.name for el in node.elements if isinstance(el, CollDef)}
    out: list[FlowItem] = []
    for item in items:
        pushed = item.env.push_cur(item.value)
        frontier = [FlowItem(item.value, item.root, pushed)]
        for index, element in enumerate(node.elements):
            last = index == len(node.elements) - 1
            next_frontier: list[FlowItem] = []
            for flow in frontier:
                if isinstance(element, VarDef):
                    bound = _eval(element.path, [flow], state)
                    if bound:
                        # Multi-valued definitions fan out, one binding each.
                        next_frontier.extend(
                            FlowItem(flow.value, o.root,
                                     o.env.bind_var(element.name, o.value))
                            for o in bound)
                    else:
                        next_frontier.append(flow)
                elif isinstance(element, CollDef):
                    values = tuple(o.value for o in
                                   _eval(element.path, [flow], state))
                    if element.required and not values:
                        continue
                    next_frontier.append(FlowItem(
                        flow.value, flow.root,
                        flow.env.bind_coll(element.name, values)))
                elif isinstance(element, FuncDef):
                    next_frontier.append(flow)  # resolved at link time
                else:
                    element_out = _eval(element, [flow], state)
                    if last:
                        next_frontier.extend(element_out)
                    else:
                        # Each output re-feeds the original block input.
                        next_frontier.extend(
                            FlowItem(flow.value, o.root, o.env)
                            for o in element_out)
            frontier = next_frontier
        for o in frontier:
            out.append(FlowItem(o.value, o.root,
                                _unscope(o.env, item.env, var_names, coll_names)))
    return out


def _unscope(env: Env, outer: Env, var_names: set, coll_names: set) -> Env:
    """Drop block-scoped defs and restore the outer `?cur` stack."""
    if not var_names and not coll_names:
        return env.with_cur(outer.cur)
    new_vars = dict(env.vars)
    for name in var_names:
        if name in outer.vars:
            new_vars[name] = outer.vars[name]
        else:
            new_vars.pop(name, None)
    new_colls = dict(env.colls)
    for name in coll_names:
        if name in outer.colls:
            new_colls[name] = outer.colls[name]
        else:
            new_colls.pop(name, None)
    return Env(new_vars, new_colls, outer.cur)


def _eval_classify(node: Classify, items, state) -> list[FlowItem]:
    out = []
    for item in items:
        probe = FlowItem(item.value, item.root, item.env.push_cur(item.value))
        chosen = None
        for cond, body in node.cases:
            if _eval(cond, [probe], state):
                chosen = body
                break
        if chosen is None:
            chosen = node.default
        if chosen is None:
            out.append(item)  # implicit default: output the input
            continue
        for o in _eval(chosen, [probe], state):
            out.append(FlowItem(o.value, o.root, o.env.with_cur(item.env.cur)))
    return out


def _eval_compare(node: Compare, items, state) -> list[FlowItem]:
    out = []
    for it in items:
        left = _eval(node.left, [it], state)
        right = _eval(node.right, [it], state)
        found = any(
            a.value is not None and b.value is not None
            and equals(a.value, b.value)
            for a in left for b in right)
        out.append(FlowItem(Bool(found), it.root, it.env))
    return out


def _is_number(v) -> bool:
    return isinstance(v, (Int, Double))


def _eval_arith(node: Arith, items, state) -> list[FlowItem]:
    op = node.op
    out = []
    for it in items:
        left = _eval(node.left, [it], state)
        right = _eval(node.right, [it], state)
        for a in left:
            for b in right:
                if not (_is_number(a.value) and _is_number(b.value)):
                    continue
                result = _arith_value(op, a.value, b.value, node)
                if result is not None:
                    out.append(FlowItem(result, it.root, it.env))
    return out


def _arith_value(op: str, a, b, node) -> Optional[Value]:
    both_int = isinstance(a, Int) and isinstance(b, Int)
    x, y = a.value, b.value
    if op == "/":
        if both_int:
            if y == 0:
                return None  # integer division by zero yields nothing
            return Double(x / y)
        return Double(_ieee_div(float(x), float(y)))
    if both_int:
        result = x + y if op == "+" else x - y if op == "-" else x * y
        if not INT_MIN <= result <= INT_MAX:
            raise EvalError("integer overflow in '%s'%s" % (op, _pos_text(node)))
        return Int(result)
    fx, fy = float(x), float(y)
    return Double(fx + fy if op == "+" else fx - fy if op == "-" else fx * fy)


def _ieee_div(x: float, y: float) -> float:
    try:
        return x / y
    except ZeroDivisionError:
        if x == 0:
            return float("nan")
        positive_zero = math.copysign(1.0, y) > 0
        return float("inf") if (x > 0) == positive_zero else float("-inf")


# ---------------------------------------------------------------------------
# Aggregates and collection operators
# ---------------------------------------------------------------------------

_MISSING = object()


def _key_list(candidate: FlowItem, keys: list[KeySpec], state) -> list:
    """Key values for ordering; keys see the candidate as `?cur`."""
    if not keys:
        return [(candidate.value, False)]
    probe = FlowItem(candidate.value, candidate.root,
                     candidate.env.push_cur(candidate.value))
    out = []
    for key in keys:
        key_out = _eval(key.path, [probe], state)
        value = key_out[0].value if key_out else _MISSING
        out.append((value, key.descending))
    return out


def _compare_key_lists(ka: list, kb: list) -> int:
    for (va, desc), (vb, _) in zip(ka, kb):
        if va is _MISSING or vb is _MISSING:
            # Missing keys sort first, deterministically.
            c = 0 if (va is _MISSING) == (vb is _MISSING) else (-1 if va is _MISSING else 1)
        else:
            c = compare(va, vb)
        if desc:
            c = -c
        if c:
            return c
    return 0


def _sorted_by_keys(candidates: list[FlowItem], keys: list[KeySpec],
                    state, reverse: bool) -> list[FlowItem]:
    decorated = [(c, _key_list(c, keys, state)) for c in candidates]
    if reverse:
        cmp = lambda p, q: -_compare_key_lists(p[1], q[1])
    else:
        cmp = lambda p, q: _compare_key_lists(p[1], q[1])
    decorated.sort(key=functools.cmp_to_key(cmp))  # stable for equal keys
    return [c for c, _ in decorated]


def _count_value(expr, item: FlowItem, state, what: str) -> int:
    outs = _eval(expr, [item], state)
    if not outs:
        raise EvalError("%s produced no value%s" % (what, _pos_text(expr)))
    value = outs[0].value
    if not isinstance(value, Int) or value.value < 0:
        raise EvalError("%s must be a non-negative Int%s" % (what, _pos_text(expr)))
    return value.value


def _eval_aggregate(node: Aggregate, items, state) -> list[FlowItem]:
    kind = node.kind
    out: list[FlowItem] = []
    for item in items:
        body_out = _eval(node.args[0], [item], state)
        if kind == "Count":
            out.append(FlowItem(Int(len(body_out)), item.root, item.env))
        elif kind == "Sum":
            result = _sum_values([o.value for o in body_out], node)
            if result is not None:
                out.append(FlowItem(result, item.root, item.env))
        elif kind in ("Min", "Max"):
            if body_out:
                ordered = _sorted_by_keys(body_out, node.keys, state,
                                          reverse=(kind == "Max"))
                out.append(ordered[0])
        elif kind == "Dedup":
            out.extend(_dedup(body_out, node.keys, state))
        elif kind == "Slice":
            length = _count_value(node.args[1], item, state, "Slice length")
            offset = 0
            if len(node.args) > 2:
                offset = _count_value(node.args[2], item, state, "Slice offset")
            out.extend(body_out[offset:offset + length])
        elif kind in ("Top", "Rtop"):
            k = _count_value(node.args[1], item, state, "%s count" % kind)
            ordered = _sorted_by_keys(body_out, node.keys, state,
                                      reverse=(kind == "Rtop"))
            out.extend(ordered[:k])
        elif kind == "Sort":
            out.extend(_sorted_by_keys(body_out, node.keys, state, reverse=False))
        else:
            raise EvalError("unknown aggregate kind: %s" % kind)
    return out


def _sum_values(values: list, node) -> Optional[Value]:
    total_int = 0
    total_float = 0.0
    saw_double = False
    for v in values:
        if isinstance(v, Int):
            total_int += v.value
        elif isinstance(v, Double):
            saw_double = True
            total_float += v.value
        else:
            return None  # any non-numeric output suppresses the sum
    if saw_double:
        return Double(total_float + total_int)
    if not INT_MIN <= total_int <= INT_MAX:
        raise EvalError("integer overflow in Sum%s" % _pos_text(node))
    return Int(total_int)


def _dedup(candidates: list[FlowItem], keys: list[KeySpec], state) -> list[FlowItem]:
    out = []
    seen: dict = {}
    fallback: list = []  # unhashable or NaN-ish keys get a linear scan
    for c in candidates:
        if keys:
            key = tuple(kv for kv, _ in _key_list(c, keys, state))
        else:
            key = c.value
        try:
            if key in seen:
                continue
            seen[key] = None
        except TypeError:
            if any(key == old for old in fallback):
                continue
            fallback.append(key)
        out.append(c)
    return out


# ---------------------------------------------------------------------------
# Records
# ---------------------------------------------------------------------------

def _eval_record(node: RecordCtor, items, state) -> list[FlowItem]:
    out = []
    for item in items:
        probe = FlowItem(item.value, item.root, item.env.push_cur(item.value))
        order: list[str] = []
        collected: dict[str, list[Value]] = {}
        dead = False
        for field in node.fields:
            field_out = _eval(field.value, [probe], state)
            values = [o.value for o in field_out]
            if field.required and not values:
                dead = True
                break
            if field.merge:
                for v in values:
                    if not isinstance(v, Record):
                        raise EvalError("@merge value is not a record%s"
                                        % _pos_text(node))
                    for name, vals in v.fields:
                        if name not in collected:
                            order.append(name)
                            collected[name] = []
                        collected[name].extend(vals)
            elif values:
                if field.name not in collected:
                    order.append(field.name)
                    collected[field.name] = []
                collected[field.name].extend(values)
        if dead or not order:
            continue
        record = Record(tuple((n, tuple(collected[n])) for n in order))
        out.append(FlowItem(record, item.root, item.env))
    return out


def _eval_field_access(node: FieldAccess, items, state) -> list[FlowItem]:
    out = []
    for item in items:
        for o in _eval(node.base, [item], state):
            values = [o.value]
            for name in node.names:
                next_values = []
                for v in values:
                    if isinstance(v, Record):
                        next_values.extend(v.get(name))
                values = next_values
            out.extend(FlowItem(v, o.root, o.env) for v in values)
    return out


# ---------------------------------------------------------------------------
# Calls
# ---------------------------------------------------------------------------

def _eval_call(node: Call, items, state) -> list[FlowItem]:
    entry: FunctionEntry = node.target
    if entry is None:
        raise EvalError("unresolved call: %s (program was not linked)" % node.name)
    if entry.kind == "builtin":
        return _eval_builtin(node, entry, items, state)
    if entry.kind == "external":
        return _eval_external(node, entry, items, state)
    return _eval_function(node, entry, items, state)


def _eval_builtin(node: Call, entry: FunctionEntry, items, state) -> list[FlowItem]:
    out = []
    for item in items:
        arg_values = [tuple(o.value for o in _eval(a, [item], state))
                      for a in node.args]
        produced = entry.builtin.fn(item.value, *arg_values)
        out.extend(FlowItem(v, item.root, item.env) for v in produced)
    return out


def _eval_external(node: Call, entry: FunctionEntry, items, state) -> list[FlowItem]:
    out = []
    for item in items:
        arg_values = [tuple(o.value for o in _eval(a, [item], state))
                      for a in node.args]
        produced = entry.host_fn(*arg_values)
        for v in produced:
            if not isinstance(v, VALUE_TYPES):
                raise EvalError("external function %s returned a non-value: %r"
                                % (node.name, v))
            out.append(FlowItem(v, item.root, item.env))
    return out


def _eval_function(node: Call, entry: FunctionEntry, items, state) -> list[FlowItem]:
    out = []
    for item in items:
        arg_outs = [_eval(a, [item], state) for a in node.args]
        var_positions = [i for i, p in enumerate(entry.params) if p.kind == "var"]
        var_choices = [[o.value for o in arg_outs[i]] for i in var_positions]
        for combo in itertools.product(*var_choices):
            env = EMPTY_ENV
            for i, value in zip(var_positions, combo):
                env = env.bind_var(entry.params[i].name, value)
            for i, p in enumerate(entry.params):
                if p.kind == "coll":
                    env = env.bind_coll(p.name,
                                        tuple(o.value for o in arg_outs[i]))
            body_out = _invoke(entry, FlowItem(item.value, item.root, env), state)
            # Function-internal bindings stay inside: restore the caller env.
            out.extend(FlowItem(o.value, o.root, item.env) for o in body_out)
    return out


def _invoke(entry: FunctionEntry, flow: FlowItem, state) -> list[FlowItem]:
    if entry.kind == "plain":
        return _eval(entry.plain_body, [flow], state)
    # Bounded recursion: depths 1..N-1 expand the recursive body, depth N
    # takes the base body; empty intermediate collections end it earlier.
    key = id(entry)
    depth = state.depths.get(key, 0) + 1
    body = entry.recur_body if depth < entry.bound else entry.base_body
    previous = state.depths.get(key)
    state.depths[key] = depth
    try:
        return _eval(body, [flow], state)
    finally:
        if previous is None:
            del state.depths[key]
        else:
            state.depths[key] = previous
