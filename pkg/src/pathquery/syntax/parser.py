"""Recursive-descent parser for queries, modules, and standalone literals.

Precedence, loosest first: `==`, then `+ -`, then `* /`, then Dot
composition, then `->` field access, then atoms.  Dot is
left-associative and `==` does not chain.  Parenthesized paths with a
comma are tuples; without one they are plain grouping.
"""

from __future__ import annotations

from ..errors import ParseError
from ..values import (Bool, Double, Id, Int, Record, String, Text, Value,
                      parse_datetime_body, parse_duration_body)
from .lexer import Token, tokenize
from .nodes import (Aggregate, AGGREGATE_KINDS, Arith, Bind, Block, Call,
                    Classify, CollDef, CollRef, Compare, CurRef, Definition,
                    Dot, Entities, ExternalDef, Field, FieldAccess, FuncDef,
                    Import, KeySpec, Literal, Module, OptionalPath, Param,
                    ParamsRef, PathExpr, Predicate, Prohibit, RecordCtor,
                    Require, RootRef, Roots, TuplePath, VarDef, VarRef, Where)

LITERAL_CTOR_NAMES = frozenset({"Id", "Int", "Double", "DateTime", "Duration", "Text"})

_AGG_WITH_KEYS = frozenset({"Min", "Max", "Dedup", "Top", "Rtop", "Sort"})


class Parser:
    def __init__(self, tokens: list[Token], filename: str | None = None):
        self.tokens = tokens
        self.pos = 0
        self.filename = filename

    # -- token plumbing ----------------------------------------------------

    def peek(self, offset: int = 0) -> Token:
        i = min(self.pos + offset, len(self.tokens) - 1)
        return self.tokens[i]

    def at(self, kind: str) -> bool:
        return self.peek().kind == kind

    def at_kw(self, word: str) -> bool:
        t = self.peek()
        return t.kind == "KW" and t.value == word

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def expect(self, kind: str, what: str | None = None) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            self.error("expected %s, got %s" % (what or repr(kind), _describe(tok)), tok)
        return self.advance()

    def expect_kw(self, word: str) -> Token:
        tok = self.peek()
        if not self.at_kw(word):
            self.error("expected '%s', got %s" % (word, _describe(tok)), tok)
        return self.advance()

    def error(self, message: str, tok: Token | None = None):
        tok = tok or self.peek()
        raise ParseError(message, line=tok.line, col=tok.col, filename=self.filename)

    # -- paths --------------------------------------------------------------

    def parse_path(self) -> PathExpr:
        left = self.parse_additive()
        if self.at("=="):
            tok = self.advance()
            right = self.parse_additive()
            return Compare(left, right, pos=(tok.line, tok.col))
        return left

    def parse_additive(self) -> PathExpr:
        left = self.parse_multiplicative()
        while self.peek().kind in ("+", "-"):
            tok = self.advance()
            right = self.parse_multiplicative()
            left = Arith(tok.kind, left, right, pos=(tok.line, tok.col))
        return left

    def parse_multiplicative(self) -> PathExpr:
        left = self.parse_composition()
        while self.peek().kind in ("*", "/"):
            tok = self.advance()
            right = self.parse_composition()
            left = Arith(tok.kind, left, right, pos=(tok.line, tok.col))
        return left

    def parse_composition(self) -> PathExpr:
        left = self.parse_postfix()
        while self.at("."):
            dot = self.advance()
            if self.at_kw("bind"):
                self.advance()
                self.expect("(", "'(' after bind")
                var = self.expect("VAR", "a '?name' variable")
                self.expect(")", "')'")
                left = Bind(left, var.value, pos=(dot.line, dot.col))
            else:
                right = self.parse_postfix()
                left = Dot(left, right, pos=(dot.line, dot.col))
        return left

    def parse_postfix(self) -> PathExpr:
        expr = self.parse_atom()
        if self.at("->"):
            tok = self.peek()
            names = []
            while self.at("->"):
                self.advance()
                names.append(self.expect("IDENT", "a field name").value)
            expr = FieldAccess(expr, names, pos=(tok.line, tok.col))
        return expr

    def parse_atom(self) -> PathExpr:
        tok = self.peek()
        pos = (tok.line, tok.col)
        if tok.kind == "INT":
            self.advance()
            return Literal(self._int_value(tok.value, tok), pos=pos)
        if tok.kind == "DOUBLE":
            self.advance()
            return Literal(Double(tok.value), pos=pos)
        if tok.kind == "-":
            nxt = self.peek(1)
            if nxt.kind == "INT":
                self.advance()
                self.advance()
                return Literal(self._int_value(-nxt.value, tok), pos=pos)
            if nxt.kind == "DOUBLE":
                self.advance()
                self.advance()
                return Literal(Double(-nxt.value), pos=pos)
            self.error("unexpected '-'", tok)
        if tok.kind == "STRING":
            self.advance()
            return Literal(String(tok.value), pos=pos)
        if self.at_kw("true") or self.at_kw("false"):
            self.advance()
            return Literal(Bool(tok.value == "true"), pos=pos)
        if tok.kind == "PRED":
            self.advance()
            return Predicate(tok.value, reverse=False, pos=pos)
        if tok.kind == "REVPRED":
            self.advance()
            return Predicate(tok.value, reverse=True, pos=pos)
        if tok.kind == "AT":
            self.advance()
            if tok.value == "entities":
                return Entities(pos=pos)
            if tok.value == "roots":
                return Roots(pos=pos)
            if tok.value == "merge":
                self.error("@merge is only valid as a record field name", tok)
            self.error("unknown '@' construct: @%s" % tok.value, tok)
        if tok.kind == "VAR":
            self.advance()
            if tok.value == "cur":
                return CurRef(pos=pos)
            if tok.value == "root":
                return RootRef(pos=pos)
            if tok.value == "params":
                return ParamsRef(pos=pos)
            return VarRef(tok.value, pos=pos)
        if tok.kind == "COLL":
            self.advance()
            return CollRef(tok.value, pos=pos)
        if tok.kind == "[":
            self.advance()
            body = self.parse_path()
            self.expect("]", "']' closing the where clause")
            return Where(body, pos=pos)
        if tok.kind == "(":
            self.advance()
            first = self.parse_path()
            if self.at(","):
                branches = [first]
                while self.at(","):
                    self.advance()
                    branches.append(self.parse_path())
                self.expect(")", "')' closing the tuple")
                return TuplePath(branches, pos=pos)
            self.expect(")", "')'")
            return first
        if tok.kind == "{":
            return self.parse_braced()
        if self.at_kw("require") or self.at_kw("prohibit") or self.at_kw("optional"):
            self.advance()
            self.expect("(", "'(' after %s" % tok.value)
            body = self.parse_path()
            self.expect(")", "')'")
            ctor = {"require": Require, "prohibit": Prohibit,
                    "optional": OptionalPath}[tok.value]
            return ctor(body, pos=pos)
        if self.at_kw("classify"):
            return self.parse_classify()
        if self.at_kw("bind"):
            self.error("bind must follow a path: use P.bind(?x)", tok)
        if tok.kind == "IDENT":
            return self.parse_named_atom()
        self.error("expected a path, got %s" % _describe(tok), tok)

    def _int_value(self, raw: int, tok: Token) -> Int:
        try:
            return Int(raw)
        except ValueError as exc:
            self.error(str(exc), tok)

    def parse_named_atom(self) -> PathExpr:
        tok = self.advance()
        pos = (tok.line, tok.col)
        name = tok.value
        if name in LITERAL_CTOR_NAMES and self.at("("):
            return Literal(self.parse_literal_ctor(name, tok), pos=pos)
        if name in AGGREGATE_KINDS and self.at("("):
            return self.parse_aggregate(name, pos)
        if self.at("::"):
            self.advance()
            fn = self.expect("IDENT", "a function name after '::'")
            return self.parse_call(name, fn.value, pos)
        if self.at("("):
            return self.parse_call(None, name, pos)
        self.error("expected '(' after '%s' (a bare identifier is not a path)"
                   % name, tok)

    def parse_call(self, namespace: str | None, name: str, pos) -> Call:
        self.expect("(", "'(' opening the argument list")
        args = []
        if not self.at(")"):
            args.append(self.parse_path())
            while self.at(","):
                self.advance()
                args.append(self.parse_path())
        self.expect(")", "')' closing the argument list")
        return Call(namespace, name, args, pos=pos)

    def parse_literal_ctor(self, name: str, tok: Token) -> Value:
        self.expect("(")
        args = []
        while not self.at(")"):
            if args:
                self.expect(",", "',' between literal arguments")
            s = self.expect("STRING", "a string literal inside %s(...)" % name)
            args.append(s.value)
        self.expect(")")
        try:
            return _build_ctor_literal(name, args)
        except ValueError as exc:
            self.error(str(exc), tok)

    def parse_aggregate(self, kind: str, pos) -> Aggregate:
        self.expect("(")
        args = [self.parse_path()]
        keys: list[KeySpec] = []
        if kind in ("Top", "Rtop"):
            self.expect(",", "',' before the %s count" % kind)
            args.append(self.parse_path())
        elif kind == "Slice":
            self.expect(",", "',' before the Slice length")
            args.append(self.parse_path())
            if self.at(","):
                self.advance()
                args.append(self.parse_path())
        if kind in _AGG_WITH_KEYS:
            while self.at(","):
                self.advance()
                keys.append(self.parse_key())
        if not self.at(")"):
            self.error("%s does not take further arguments" % kind)
        self.advance()
        return Aggregate(kind, args, keys, pos=pos)

    def parse_key(self) -> KeySpec:
        descending = False
        if self.at("-"):
            # In key position '-' always means descending order.
            self.advance()
            descending = True
        return KeySpec(self.parse_path(), descending)

    def parse_classify(self) -> Classify:
        tok = self.expect_kw("classify")
        pos = (tok.line, tok.col)
        self.expect("{", "'{' after classify")
        cases: list[tuple[PathExpr, PathExpr]] = []
        default: PathExpr | None = None
        while not self.at("}"):
            if self.at_kw("else"):
                if default is not None:
                    self.error("duplicate else case in classify")
                self.advance()
                self.expect(":", "':' after else")
                default = self.parse_braced()
            elif self.at("["):
                if default is not None:
                    self.error("else must be the last classify case")
                cond_tok = self.advance()
                cond_body = self.parse_path()
                self.expect("]", "']' closing the classify condition")
                cond = Where(cond_body, pos=(cond_tok.line, cond_tok.col))
                self.expect(":", "':' after the classify condition")
                cases.append((cond, self.parse_braced()))
            else:
                self.error("expected a '[...]' case or 'else' in classify")
        self.advance()
        if not cases:
            self.error("classify needs at least one bracketed case", tok)
        return Classify(cases, default, pos=pos)

    # -- braces: blocks and records -----------------------------------------

    def parse_braced(self) -> PathExpr:
        tok = self.expect("{", "'{'")
        if self.at("}"):
            self.error("empty braces: expected block elements or record fields", tok)
        if self._record_lookahead():
            return self.parse_record_body(tok)
        return self.parse_block_body(tok)

    def _record_lookahead(self) -> bool:
        i = 0
        if self.at_kw("require"):
            i = 1
        t = self.peek(i)
        after = self.peek(i + 1)
        if t.kind == "IDENT" and after.kind == ":":
            return True
        return t.kind == "AT" and t.value == "merge" and after.kind == ":"

    def parse_record_body(self, open_tok: Token) -> RecordCtor:
        fields: list[Field] = []
        names = set()
        while not self.at("}"):
            if self.at(","):  # optional separators between fields
                self.advance()
                continue
            required = False
            if self.at_kw("require"):
                self.advance()
                required = True
            tok = self.peek()
            if tok.kind == "AT" and tok.value == "merge":
                self.advance()
                name, merge = "@merge", True
            elif tok.kind == "IDENT":
                self.advance()
                name, merge = tok.value, False
            else:
                self.error("expected a field name, got %s" % _describe(tok), tok)
            self.expect(":", "':' after the field name")
            value = self.parse_path()
            if not merge:
                if name in names:
                    self.error("duplicate record field: %s" % name, tok)
                names.add(name)
            fields.append(Field(name, value, required=required, merge=merge))
        self.advance()
        if not fields:
            self.error("a record needs at least one field", open_tok)
        return RecordCtor(fields, pos=(open_tok.line, open_tok.col))

    def parse_block_body(self, open_tok: Token) -> Block:
        elements = []
        while not self.at("}"):
            if self.at(";"):
                self.advance()
                continue
            elements.append(self.parse_block_element())
            if not self.at("}"):
                self.expect(";", "';' between block elements")
        self.advance()
        if not elements:
            self.error("a block needs at least one element", open_tok)
        if isinstance(elements[-1], (VarDef, CollDef, FuncDef)):
            self.error("a block must end with a path, not a definition", open_tok)
        return Block(elements, pos=(open_tok.line, open_tok.col))

    def parse_block_element(self):
        if self.at_kw("require") and self.peek(1).kind == "KW" \
                and self.peek(1).value == "def":
            tok = self.advance()
            self.advance()
            coll = self.expect("COLL", "a collection name after 'require def'")
            path = self.parse_path()
            return CollDef(coll.value, path, required=True, pos=(tok.line, tok.col))
        if self.at_kw("def"):
            tok = self.advance()
            if self.at("VAR"):
                var = self.advance()
                return VarDef(var.value, self.parse_path(), pos=(tok.line, tok.col))
            if self.at("COLL"):
                coll = self.advance()
                return CollDef(coll.value, self.parse_path(), required=False,
                               pos=(tok.line, tok.col))
            return self.parse_funcdef(tok)
        if self.at_kw("external"):
            self.error("external definitions are only allowed at the top level")
        return self.parse_path()

    # -- definitions and top level ------------------------------------------

    def parse_funcdef(self, def_tok: Token) -> FuncDef:
        kind, bound = "plain", None
        if self.at_kw("base"):
            self.advance()
            kind = "base"
        elif self.at_kw("recur"):
            self.advance()
            self.expect("<", "'<' after recur")
            n = self.expect("INT", "the recursion bound")
            if n.value < 1:
                self.error("recursion bound must be at least 1", n)
            self.expect(">", "'>' after the recursion bound")
            kind, bound = "recur", n.value
        name = self.expect("IDENT", "a function name")
        params = self.parse_params()
        body = self.parse_braced()
        return FuncDef(name.value, params, kind, bound, body,
                       pos=(def_tok.line, def_tok.col))

    def parse_params(self) -> list[Param]:
        self.expect("(", "'(' opening the parameter list")
        params = []
        while not self.at(")"):
            if params:
                self.expect(",", "',' between parameters")
            tok = self.peek()
            if tok.kind == "VAR":
                self.advance()
                params.append(Param("var", tok.value))
            elif tok.kind == "COLL":
                self.advance()
                params.append(Param("coll", tok.value))
            else:
                self.error("expected a '?var' or '$coll' parameter, got %s"
                           % _describe(tok), tok)
        self.advance()
        return params

    def parse_external(self, ext_tok: Token) -> ExternalDef:
        self.expect_kw("def")
        expr_kw = False
        if self.at_kw("expr"):  # accepted but semantically inert
            self.advance()
            expr_kw = True
        name = self.expect("IDENT", "a function name")
        params = self.parse_params()
        self.expect_kw("implemented_by")
        registry_name = self.expect("STRING", "the registry name string")
        return ExternalDef(name.value, params, registry_name.value, expr_kw,
                           pos=(ext_tok.line, ext_tok.col))

    def parse_imports(self) -> list[Import]:
        imports = []
        while self.at_kw("import"):
            tok = self.advance()
            path = self.expect("STRING", "a module path string")
            alias = None
            if self.at_kw("into"):
                self.advance()
                alias = self.expect("IDENT", "a namespace alias").value
            imports.append(Import(path.value, alias, pos=(tok.line, tok.col)))
        return imports

    def parse_definitions(self) -> list[Definition]:
        defs: list[Definition] = []
        while True:
            if self.at_kw("def"):
                tok = self.advance()
                if self.peek().kind in ("VAR", "COLL"):
                    self.error("variable and collection definitions must appear"
                               " inside a block", tok)
                defs.append(self.parse_funcdef(tok))
            elif self.at_kw("external"):
                defs.append(self.parse_external(self.advance()))
            elif self.at_kw("require") and self.peek(1).kind == "KW" \
                    and self.peek(1).value == "def":
                self.error("collection definitions must appear inside a block")
            elif self.at_kw("import"):
                self.error("imports must appear before definitions")
            else:
                return defs

    # -- standalone literals --------------------------------------------------

    def parse_literal_term(self) -> Value:
        tok = self.peek()
        if tok.kind == "INT":
            self.advance()
            return self._int_value(tok.value, tok)
        if tok.kind == "DOUBLE":
            self.advance()
            return Double(tok.value)
        if tok.kind == "-" and self.peek(1).kind in ("INT", "DOUBLE"):
            self.advance()
            num = self.advance()
            if num.kind == "INT":
                return self._int_value(-num.value, num)
            return Double(-num.value)
        if tok.kind == "STRING":
            self.advance()
            return String(tok.value)
        if tok.kind == "KW" and tok.value in ("true", "false"):
            self.advance()
            return Bool(tok.value == "true")
        if tok.kind == "PRED":  # '/x' shorthand for Id('/x')
            self.advance()
            return Id(tok.value)
        if tok.kind == "IDENT" and tok.value in LITERAL_CTOR_NAMES:
            self.advance()
            return self.parse_literal_ctor(tok.value, tok)
        if tok.kind == "{":
            return self.parse_record_literal()
        self.error("expected a literal, got %s" % _describe(tok), tok)

    def parse_record_literal(self) -> Record:
        self.expect("{")
        order: list[str] = []
        values: dict[str, list[Value]] = {}
        while not self.at("}"):
            if self.at(","):
                self.advance()
                continue
            name = self.expect("IDENT", "a field name").value
            self.expect(":", "':' after the field name")
            if name not in values:
                order.append(name)
                values[name] = []
            values[name].append(self.parse_literal_term())
        self.advance()
        if not order:
            self.error("a record literal needs at least one field")
        return Record(tuple((n, tuple(values[n])) for n in order))


def _build_ctor_literal(name: str, args: list[str]) -> Value:
    def need(n: int):
        if len(args) != n:
            raise ValueError("%s(...) takes %d string argument%s, got %d"
                             % (name, n, "" if n == 1 else "s", len(args)))

    if name == "Id":
        need(1)
        return Id(args[0])
    if name == "Int":
        need(1)
        try:
            return Int(int(args[0], 10))
        except ValueError:
            raise ValueError("invalid Int literal: %r" % args[0]) from None
    if name == "Double":
        need(1)
        try:
            return Double(float(args[0]))
        except ValueError:
            raise ValueError("invalid Double literal: %r" % args[0]) from None
    if name == "DateTime":
        need(1)
        return parse_datetime_body(args[0])
    if name == "Duration":
        need(1)
        return parse_duration_body(args[0])
    if name == "Text":
        need(2)
        return Text(args[0], args[1])
    raise ValueError("unknown literal constructor: %s" % name)


def _describe(tok: Token) -> str:
    if tok.kind == "EOF":
        return "end of input"
    if tok.kind in ("IDENT", "KW"):
        return "'%s'" % tok.value
    if tok.kind in ("PRED", "REVPRED", "INT", "DOUBLE"):
        return "'%s'" % tok.value
    if tok.kind == "STRING":
        return "a string"
    if tok.kind == "VAR":
        return "'?%s'" % tok.value
    if tok.kind == "COLL":
        return "'$%s'" % tok.value
    if tok.kind == "AT":
        return "'@%s'" % tok.value
    return "'%s'" % tok.kind


# ---------------------------------------------------------------------------
# Entry points
# ---------------------------------------------------------------------------

def parse_query(source: str, filename: str | None = None):
    """Parse a query file into (imports, definitions, root path)."""
    parser = Parser(tokenize(source, filename), filename)
    imports = parser.parse_imports()
    defs = parser.parse_definitions()
    if parser.at("EOF"):
        parser.error("empty query")
    root = parser.parse_path()
    if not parser.at("EOF"):
        parser.error("unexpected %s after the query path"
                     % _describe(parser.peek()))
    return imports, defs, root


def parse_module(source: str, path: str, filename: str | None = None) -> Module:
    """Parse a module file: imports plus function/external definitions only."""
    parser = Parser(tokenize(source, filename), filename)
    imports = parser.parse_imports()
    defs = parser.parse_definitions()
    if not parser.at("EOF"):
        parser.error("top-level paths are not allowed in a module "
                     "(only function definitions)")
    return Module(path, imports, defs)


def parse_value_literal(source: str, filename: str | None = None) -> Value:
    """Parse one standalone literal ('/x' Id shorthand allowed)."""
    parser = Parser(tokenize(source, filename), filename)
    value = parser.parse_literal_term()
    if not parser.at("EOF"):
        parser.error("unexpected %s after the literal" % _describe(parser.peek()))
    return value
