"""Built-in functions and the registry for host-implemented functions.

Built-ins are unqualified functions resolvable from any module.  Only
TextLang has real behavior; the rest of the standard catalog ships as
named stubs that parse and link but raise when invoked.  Host functions
declared with `external def ... implemented_by 'Name'` are looked up in
an ExternalFunctionRegistry by that registry name.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

from .errors import EvalError
from .values import String, Text, Value

# A built-in receives the input value plus one tuple of values per
# declared argument, and yields output values.
BuiltinImpl = Callable[..., Iterable[Value]]


@dataclass(frozen=True)
class Builtin:
    name: str
    arity: int
    fn: BuiltinImpl


def text_lang(value: Value) -> list[Value]:
    """Language tag of a Text value; nothing for any other type."""
    if isinstance(value, Text):
        return [String(value.lang)]
    return []


def _stub(name: str) -> BuiltinImpl:
    def fn(value, *args):
        raise EvalError("built-in function %s is not implemented" % name)
    return fn


BUILTINS: dict[str, Builtin] = {
    "TextLang": Builtin("TextLang", 0, text_lang),
    # Geo support is declared but stubbed; calling it fails loudly.
    "AreaIntersects": Builtin("AreaIntersects", 2, _stub("AreaIntersects")),
}


# A host function receives one tuple of argument values per declared
# parameter and returns an iterable of output values.  It must be pure
# and safe for concurrent invocation; it never sees the graph.
HostFunction = Callable[..., Iterable[Value]]


class ExternalFunctionRegistry:
    """Host functions keyed by their `implemented_by` registry name."""

    def __init__(self) -> None:
        self._functions: dict[str, HostFunction] = {}

    def register(self, name: str, fn: HostFunction) -> None:
        if name in self._functions:
            raise ValueError("external function already registered: %s" % name)
        self._functions[name] = fn

    def lookup(self, name: str) -> HostFunction | None:
        return self._functions.get(name)

    def names(self) -> list[str]:
        return sorted(self._functions)


#: Registry used when a caller does not supply one (the CLI's default).
default_registry = ExternalFunctionRegistry()
