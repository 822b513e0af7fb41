"""Syntax tree node types for queries and modules.

Every path construct gets one dataclass.  Nodes compare structurally so
that the pretty-printer's render/reparse fixpoint can be checked with
plain equality; source positions and resolved call targets are excluded
from comparisons.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from ..values import Value

Pos = "tuple[int, int] | None"


@dataclass
class Entities:
    pos: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass
class Roots:
    pos: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass
class Literal:
    value: Value
    pos: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass
class Predicate:
    label: str
    reverse: bool = False
    pos: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass
class Dot:
    left: "PathExpr"
    right: "PathExpr"
    pos: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass
class Where:
    body: "PathExpr"
    pos: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass
class Require:
    body: "PathExpr"
    pos: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass
class Prohibit:
    body: "PathExpr"
    pos: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass
class OptionalPath:
    body: "PathExpr"
    pos: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass
class TuplePath:
    branches: list["PathExpr"]
    pos: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass
class Block:
    elements: list["BlockElement"]
    pos: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass
class Classify:
    cases: list[tuple["PathExpr", "PathExpr"]]
    default: Optional["PathExpr"] = None
    pos: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass
class Field:
    name: str
    value: "PathExpr"
    required: bool = False
    merge: bool = False


@dataclass
class RecordCtor:
    fields: list[Field]
    pos: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass
class FieldAccess:
    base: "PathExpr"
    names: list[str]
    pos: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass
class Compare:
    left: "PathExpr"
    right: "PathExpr"
    pos: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass
class Arith:
    op: str  # one of + - * /
    left: "PathExpr"
    right: "PathExpr"
    pos: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass
class Bind:
    body: "PathExpr"
    name: str
    pos: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass
class VarRef:
    name: str
    pos: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass
class CurRef:
    pos: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass
class RootRef:
    pos: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass
class ParamsRef:
    pos: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass
class CollRef:
    name: str
    pos: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass
class Call:
    namespace: Optional[str]
    name: str
    args: list["PathExpr"]
    pos: tuple[int, int] | None = field(default=None, compare=False, repr=False)
    target: object = field(default=None, compare=False, repr=False)


@dataclass
class KeySpec:
    path: "PathExpr"
    descending: bool = False


AGGREGATE_KINDS = ("Count", "Min", "Max", "Sum", "Dedup", "Slice", "Top", "Rtop", "Sort")


@dataclass
class Aggregate:
    kind: str  # one of AGGREGATE_KINDS
    args: list["PathExpr"]  # body first, then any count arguments
    keys: list[KeySpec]
    pos: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass
class Param:
    kind: str  # 'var' | 'coll'
    name: str


@dataclass
class VarDef:
    name: str
    path: "PathExpr"
    pos: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass
class CollDef:
    name: str
    path: "PathExpr"
    required: bool = False
    pos: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass
class FuncDef:
    name: str
    params: list[Param]
    kind: str  # 'plain' | 'base' | 'recur'
    bound: Optional[int]
    body: "PathExpr"
    pos: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass
class ExternalDef:
    name: str
    params: list[Param]
    implemented_by: str
    expr_keyword: bool = False  # accepted but semantically inert
    pos: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass
class Import:
    path: str
    alias: Optional[str] = None
    pos: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass
class Module:
    path: str
    imports: list[Import]
    definitions: list[Union[FuncDef, ExternalDef]]


PathExpr = Union[
    Entities, Roots, Literal, Predicate, Dot, Where, Require, Prohibit,
    OptionalPath, TuplePath, Block, Classify, RecordCtor, FieldAccess,
    Compare, Arith, Bind, VarRef, CurRef, RootRef, ParamsRef, CollRef,
    Call, Aggregate,
]

BlockElement = Union[PathExpr, VarDef, CollDef, FuncDef]

Definition = Union[FuncDef, ExternalDef]


def child_paths(node) -> list:
    """Immediate sub-paths of a node, for generic tree walks."""
    if isinstance(node, (Dot, Compare, Arith)):
        return [node.left, node.right]
    if isinstance(node, (Where, Require, Prohibit, OptionalPath, Bind)):
        return [node.body]
    if isinstance(node, TuplePath):
        return list(node.branches)
    if isinstance(node, Block):
        out = []
        for el in node.elements:
            if isinstance(el, (VarDef, CollDef)):
                out.append(el.path)
            elif isinstance(el, FuncDef):
                out.append(el.body)
            else:
                out.append(el)
        return out
    if isinstance(node, Classify):
        out = []
        for cond, body in node.cases:
            out.extend([cond, body])
        if node.default is not None:
            out.append(node.default)
        return out
    if isinstance(node, RecordCtor):
        return [f.value for f in node.fields]
    if isinstance(node, FieldAccess):
        return [node.base]
    if isinstance(node, Call):
        return list(node.args)
    if isinstance(node, Aggregate):
        return list(node.args) + [k.path for k in node.keys]
    return []
