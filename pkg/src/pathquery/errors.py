"""Exception types shared across the package."""

from __future__ import annotations


class PathQueryError(Exception):
    """Base class for every error raised by this package."""


class SourceError(PathQueryError):
    """An error tied to a position in some source text."""

    def __init__(self, message: str, line: int | None = None,
                 col: int | None = None, filename: str | None = None):
        super().__init__(message)
        self.message = message
        self.line = line
        self.col = col
        self.filename = filename

    def __str__(self) -> str:
        prefix = []
        if self.filename:
            prefix.append(self.filename)
        if self.line is not None:
            prefix.append(str(self.line))
            if self.col is not None:
                prefix.append(str(self.col))
        if prefix:
            return "%s: %s" % (":".join(prefix), self.message)
        return self.message


class LexError(SourceError):
    """Invalid character, malformed literal, or unterminated string."""


class ParseError(SourceError):
    """The token stream does not form a valid query or module."""


class GraphLoadError(SourceError):
    """A triple file line could not be turned into a triple."""


class LinkError(SourceError):
    """Imports or function references could not be resolved."""


class EvalError(PathQueryError):
    """A runtime failure while evaluating a query."""
