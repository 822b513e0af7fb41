"""Tokenizer for query and module source text.

`//` comments and whitespace are skipped; every token carries its line
and column for diagnostics.  A '/' is a predicate token when it appears
where an expression can start, and the division operator when the
previous token could end an expression — so `Sum($p) / Count($p)` and
`Sum($p)/Count($p)` both divide, while `./price` and `(/exhibit` always
traverse.  Predicate tokens munch maximal `/seg/seg` runs, so dividing
directly after a predicate needs a space or parentheses.
"""

from __future__ import annotations

from typing import NamedTuple

from ..errors import LexError

KEYWORDS = frozenset({
    "import", "into", "def", "base", "recur", "external", "implemented_by",
    "expr", "require", "prohibit", "optional", "classify", "else", "bind",
    "true", "false",
})

# Token kinds: IDENT KW INT DOUBLE STRING PRED REVPRED VAR COLL AT EOF,
# plus one kind per punctuation spelling.
PUNCT = (":=", "::", "->", "==", ".", ",", ";", ":", "(", ")", "[", "]",
         "{", "}", "<", ">", "+", "-", "*", "/")


class Token(NamedTuple):
    kind: str
    value: object
    line: int
    col: int


def _is_ident_start(ch: str) -> bool:
    return ch.isalpha() or ch == "_"


def _is_ident_char(ch: str) -> bool:
    return ch.isalnum() or ch == "_"


def _ends_expression(tok: Token | None) -> bool:
    # VAR and COLL are deliberately absent: `def ?x /a` needs the '/a'
    # to stay a predicate, and dividing by a bare variable still works
    # when spaced (`?x / 2`).
    if tok is None:
        return False
    if tok.kind in ("IDENT", "INT", "DOUBLE", "STRING", "AT",
                    "PRED", "REVPRED", ")", "]", "}"):
        return True
    return tok.kind == "KW" and tok.value in ("true", "false")


class _Lexer:
    def __init__(self, source: str, filename: str | None = None):
        self.src = source
        self.pos = 0
        self.line = 1
        self.col = 1
        self.filename = filename
        self.tokens: list[Token] = []

    def error(self, message: str, line: int | None = None, col: int | None = None):
        raise LexError(message, line=line or self.line, col=col or self.col,
                       filename=self.filename)

    def peek(self, offset: int = 0) -> str:
        i = self.pos + offset
        return self.src[i] if i < len(self.src) else ""

    def advance(self) -> str:
        ch = self.src[self.pos]
        self.pos += 1
        if ch == "\n":
            self.line += 1
            self.col = 1
        else:
            self.col += 1
        return ch

    def emit(self, kind: str, value, line: int, col: int) -> None:
        self.tokens.append(Token(kind, value, line, col))

    def last(self) -> Token | None:
        return self.tokens[-1] if self.tokens else None

    def run(self) -> list[Token]:
        while self.pos < len(self.src):
            ch = self.peek()
            if ch in " \t\r\n":
                self.advance()
                continue
            if ch == "/" and self.peek(1) == "/":
                while self.pos < len(self.src) and self.peek() != "\n":
                    self.advance()
                continue
            line, col = self.line, self.col
            if ch.isdigit():
                self.lex_number(line, col)
            elif _is_ident_start(ch):
                self.lex_ident(line, col)
            elif ch in "'\"":
                self.lex_string(line, col)
            elif ch == "/":
                self.lex_slash(line, col)
            elif ch == "!":
                self.lex_reverse_predicate(line, col)
            elif ch in "?%$@":
                self.lex_sigil(line, col)
            else:
                self.lex_punct(line, col)
        self.tokens.append(Token("EOF", None, self.line, self.col))
        return self.tokens

    def lex_number(self, line: int, col: int) -> None:
        start = self.pos
        while self.peek().isdigit():
            self.advance()
        is_double = False
        if self.peek() == "." and self.peek(1).isdigit():
            is_double = True
            self.advance()
            while self.peek().isdigit():
                self.advance()
        if self.peek() in "eE" and (self.peek(1).isdigit()
                                    or (self.peek(1) in "+-" and self.peek(2).isdigit())):
            is_double = True
            self.advance()
            if self.peek() in "+-":
                self.advance()
            while self.peek().isdigit():
                self.advance()
        text = self.src[start:self.pos]
        if is_double:
            self.emit("DOUBLE", float(text), line, col)
        else:
            self.emit("INT", int(text), line, col)

    def lex_ident(self, line: int, col: int) -> None:
        start = self.pos
        while self.peek() and _is_ident_char(self.peek()):
            self.advance()
        text = self.src[start:self.pos]
        self.emit("KW" if text in KEYWORDS else "IDENT", text, line, col)

    def lex_string(self, line: int, col: int) -> None:
        quote = self.advance()
        out = []
        while True:
            if self.pos >= len(self.src):
                self.error("unterminated string", line, col)
            ch = self.advance()
            if ch == quote:
                break
            if ch == "\n":
                self.error("unterminated string", line, col)
            if ch == "\\":
                if self.pos >= len(self.src):
                    self.error("unterminated string", line, col)
                esc = self.advance()
                mapping = {"n": "\n", "t": "\t", "r": "\r", "\\": "\\",
                           "'": "'", '"': '"'}
                if esc not in mapping:
                    self.error("invalid escape: \\%s" % esc)
                out.append(mapping[esc])
            else:
                out.append(ch)
        self.emit("STRING", "".join(out), line, col)

    def _predicate_label(self) -> str | None:
        # '/seg' or '/seg/seg...'; segments are [A-Za-z0-9_]+
        start = self.pos
        while self.peek() == "/" and _is_ident_char(self.peek(1)):
            self.advance()
            while self.peek() and _is_ident_char(self.peek()):
                self.advance()
        if self.pos == start:
            return None
        return self.src[start:self.pos]

    def lex_slash(self, line: int, col: int) -> None:
        if _ends_expression(self.last()):
            self.advance()
            self.emit("/", "/", line, col)
            return
        label = self._predicate_label()
        if label is None:
            self.advance()
            self.emit("/", "/", line, col)
        else:
            self.emit("PRED", label, line, col)

    def lex_reverse_predicate(self, line: int, col: int) -> None:
        self.advance()
        label = self._predicate_label()
        if label is None:
            self.error("expected a predicate after '!'")
        self.emit("REVPRED", label, line, col)

    def lex_sigil(self, line: int, col: int) -> None:
        sigil = self.advance()
        start = self.pos
        while self.peek() and _is_ident_char(self.peek()):
            self.advance()
        name = self.src[start:self.pos]
        if not name:
            self.error("expected a name after '%s'" % sigil)
        if sigil == "?":
            self.emit("VAR", name, line, col)
        elif sigil == "@":
            self.emit("AT", name, line, col)
        else:  # '%' and '$' share one collection namespace
            self.emit("COLL", name, line, col)

    def lex_punct(self, line: int, col: int) -> None:
        two = self.src[self.pos:self.pos + 2]
        if two in ("::", "->", "=="):
            self.advance()
            self.advance()
            self.emit(two, two, line, col)
            return
        ch = self.peek()
        if ch == "=":
            self.error("'=' is not an operator (did you mean '==')")
        if ch in ".,;:()[]{}<>+-*":
            self.advance()
            self.emit(ch, ch, line, col)
            return
        self.error("unexpected character: %r" % ch)


def tokenize(source: str, filename: str | None = None) -> list[Token]:
    """Turn source text into a token list ending with an EOF token."""
    return _Lexer(source, filename).run()
