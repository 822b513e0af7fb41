"""PathQuery: a dataflow graph query language over edge-labelled graphs.

Typical use::

    from pathquery import load_graph, link_query, eval_query

    graph = load_graph(open("data.pqt").read())
    program = link_query("@entities./name")
    for root, value in eval_query(program, graph):
        print(root, value)
"""

from .errors import (EvalError, GraphLoadError, LexError, LinkError,
                     ParseError, PathQueryError, SourceError)
from .evaluator import QueryResult, eval_path, eval_query
from .graph import Graph, Triple, load_graph, render_graph
from .stdlib import ExternalFunctionRegistry, default_registry
from .syntax import (FileModuleLoader, MappingModuleLoader, Program, ast_dump,
                     link_query, parse_module, parse_query,
                     parse_value_literal, render_path, render_query, tokenize)
from .values import (Bool, DateTime, Double, Duration, Id, Int, Record,
                     String, Text, Value, compare, equals, is_truthy,
                     render_literal)

__version__ = "0.1.0"

__all__ = [
    "Bool", "Int", "Double", "DateTime", "Duration", "String", "Text", "Id",
    "Record", "Value", "equals", "compare", "is_truthy", "render_literal",
    "Triple", "Graph", "load_graph", "render_graph",
    "tokenize", "parse_query", "parse_module", "parse_value_literal",
    "render_path", "render_query", "ast_dump",
    "link_query", "Program", "FileModuleLoader", "MappingModuleLoader",
    "eval_query", "eval_path", "QueryResult",
    "ExternalFunctionRegistry", "default_registry",
    "PathQueryError", "SourceError", "LexError", "ParseError",
    "GraphLoadError", "LinkError", "EvalError",
]
