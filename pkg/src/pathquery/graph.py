"""Immutable in-memory edge-labelled graph with forward and reverse indexes.

Graphs load from PQT text: one triple per line, three TAB-separated
columns (subject literal, predicate, object literal).  Tokens beginning
with '/' are shorthand for Id values, '#' starts a comment line, and all
other columns use the regular literal syntax.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

from .errors import GraphLoadError, LexError, ParseError
from .values import Id, Record, Value, render_literal

_PREDICATE_RE = re.compile(r"^/\S+$")
_ID_SHORTHAND_RE = re.compile(r"^/[A-Za-z0-9_]+(?:/[A-Za-z0-9_]+)*$")


@dataclass(frozen=True)
class Triple:
    """One directed labelled edge: subject --predicate--> object."""

    subject: Value
    predicate: str
    object: Value

    def __post_init__(self) -> None:
        if isinstance(self.subject, Record):
            raise ValueError("Record subject not allowed")
        if isinstance(self.object, Record):
            raise ValueError("Record object not allowed")
        if not _PREDICATE_RE.match(self.predicate):
            raise ValueError("predicate must be a non-empty '/...' label: %r"
                             % self.predicate)


class Graph:
    """A set of triples, indexed both ways; immutable once constructed.

    Edge lists preserve first-encounter order and duplicates collapse,
    so loads from the same text are reproducible.
    """

    __slots__ = ("triples", "_spo", "_ops", "_entities")

    def __init__(self, triples: Iterable[Triple]):
        unique: dict[Triple, None] = {}
        for t in triples:
            unique.setdefault(t, None)
        self.triples: tuple[Triple, ...] = tuple(unique)
        spo: dict[Value, dict[str, list[Value]]] = {}
        ops: dict[Value, dict[str, list[Value]]] = {}
        entities: dict[Value, None] = {}
        for t in self.triples:
            spo.setdefault(t.subject, {}).setdefault(t.predicate, []).append(t.object)
            ops.setdefault(t.object, {}).setdefault(t.predicate, []).append(t.subject)
            entities.setdefault(t.subject, None)
            if isinstance(t.object, Id):
                entities.setdefault(t.object, None)
        self._spo = spo
        self._ops = ops
        self._entities = tuple(entities)

    def __len__(self) -> int:
        return len(self.triples)

    def out_edges(self, node: Value, predicate: str) -> list[Value]:
        """Objects of all (node, predicate, _) triples, in stable order."""
        return list(self._spo.get(node, {}).get(predicate, ()))

    def in_edges(self, node: Value, predicate: str) -> list[Value]:
        """Subjects of all (_, predicate, node) triples, in stable order."""
        return list(self._ops.get(node, {}).get(predicate, ()))

    def all_entities(self) -> list[Value]:
        """Distinct subjects plus Id-typed objects, in encounter order."""
        return list(self._entities)


def _parse_node(token: str, lineno: int, filename: str | None) -> Value:
    if token.startswith("/") and _ID_SHORTHAND_RE.match(token):
        return Id(token)
    # Local import: the parser package depends on values, not on graph.
    from .syntax.parser import parse_value_literal
    try:
        return parse_value_literal(token)
    except (LexError, ParseError) as exc:
        raise GraphLoadError("bad node literal %r: %s" % (token, exc.message),
                             line=lineno, filename=filename) from None


def load_graph(source: str, filename: str | None = None) -> Graph:
    """Parse PQT text into a Graph; duplicate lines collapse to one triple."""
    triples = []
    for lineno, raw in enumerate(source.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in raw.split("\t")]
        parts = [p for p in parts if p]
        if len(parts) != 3:
            raise GraphLoadError("expected 3 TAB-separated columns, got %d"
                                 % len(parts), line=lineno, filename=filename)
        subject = _parse_node(parts[0], lineno, filename)
        predicate = parts[1]
        obj = _parse_node(parts[2], lineno, filename)
        try:
            triples.append(Triple(subject, predicate, obj))
        except ValueError as exc:
            raise GraphLoadError(str(exc), line=lineno, filename=filename) from None
    return Graph(triples)


def _node_token(v: Value) -> str:
    if isinstance(v, Id) and _ID_SHORTHAND_RE.match(v.value):
        return v.value
    return render_literal(v)


def render_graph(g: Graph) -> str:
    """Serialize back to PQT text; load_graph(render_graph(g)) reproduces g."""
    lines = []
    for t in g.triples:
        lines.append("%s\t%s\t%s" % (_node_token(t.subject), t.predicate,
                                     _node_token(t.object)))
    return "\n".join(lines) + ("\n" if lines else "")
