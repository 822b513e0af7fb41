"""Lexer, parser, pretty-printer, and module linker."""

from .lexer import Token, tokenize
from .linker import (FileModuleLoader, FunctionEntry, MappingModuleLoader,
                     Program, link_query)
from .parser import parse_module, parse_query, parse_value_literal
from .printer import ast_dump, render_module, render_path, render_query

__all__ = [
    "Token", "tokenize",
    "parse_query", "parse_module", "parse_value_literal",
    "render_path", "render_query", "render_module", "ast_dump",
    "link_query", "Program", "FunctionEntry",
    "FileModuleLoader", "MappingModuleLoader",
]
