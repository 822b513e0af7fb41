"""Module loading, import resolution, and call-target binding.

Linking turns an entry query plus its transitively imported modules into
a Program whose every Call node carries a resolved target: a PathQuery
function (plain or base/recur pair), a registered host function, or a
built-in.  Imports are namespaced by alias or file stem; cycles,
collisions, arity mismatches, and unpaired recursive definitions are
link errors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Optional

from ..errors import LinkError
from ..stdlib import (BUILTINS, Builtin, ExternalFunctionRegistry,
                      default_registry)
from .nodes import (Block, Call, CollDef, ExternalDef, FuncDef, Import,
                    Module, Param, PathExpr, VarDef, child_paths)
from .parser import parse_module, parse_query

QUERY_KEY = "<query>"


@dataclass
class FunctionEntry:
    """One callable unit: a function, a base/recur pair, or an external."""

    name: str
    params: list[Param]
    kind: str  # 'plain' | 'recursive' | 'external' | 'builtin'
    module_key: str
    plain_body: Optional[PathExpr] = None
    base_body: Optional[PathExpr] = None
    recur_body: Optional[PathExpr] = None
    bound: int = 0
    host_fn: object = None
    builtin: Optional[Builtin] = None
    external_decl: Optional[ExternalDef] = None

    @property
    def arity(self) -> int:
        if self.builtin is not None:
            return self.builtin.arity
        return len(self.params)


@dataclass
class ModuleScope:
    key: str
    module: Module
    functions: dict[str, FunctionEntry] = field(default_factory=dict)
    aliases: dict[str, str] = field(default_factory=dict)  # namespace -> module key


@dataclass
class Program:
    """A linked query: validated root path plus all reachable functions."""

    root: PathExpr
    imports: list[Import]
    definitions: list
    scopes: dict[str, ModuleScope]


class MappingModuleLoader:
    """Resolves module paths from an in-memory mapping; handy for tests."""

    def __init__(self, modules: Mapping[str, str]):
        self._modules = dict(modules)

    def load(self, path: str, importer_key: str | None) -> tuple[str, str]:
        if path not in self._modules:
            raise LinkError("module not found: %s" % path)
        return path, self._modules[path]


class FileModuleLoader:
    """Resolves module paths against the importer's directory, then a search path."""

    def __init__(self, search_paths: list[str | Path] | None = None):
        self.search_paths = [Path(p) for p in (search_paths or [])]

    def load(self, path: str, importer_key: str | None) -> tuple[str, str]:
        candidates = []
        if importer_key and importer_key != QUERY_KEY:
            candidates.append(Path(importer_key).parent / path)
        candidates.extend(base / path for base in self.search_paths)
        for candidate in candidates:
            if candidate.is_file():
                resolved = candidate.resolve()
                return str(resolved), resolved.read_text(encoding="utf-8")
        raise LinkError("module not found: %s" % path)


def _query_key(filename: str | None) -> str:
    # A real path lets self-imports surface as cycles rather than as
    # module parse errors.
    if filename:
        return str(Path(filename).resolve())
    return QUERY_KEY


ModuleLoader = Callable  # anything with .load(path, importer_key)


def _namespace_for(imp: Import) -> str:
    return imp.alias if imp.alias else Path(imp.path).stem


def _group_definitions(defs, module_key: str, where: str) -> dict[str, FunctionEntry]:
    """Group same-scope definitions by name, pairing base with recur."""
    groups: dict[str, list] = {}
    for d in defs:
        groups.setdefault(d.name, []).append(d)
    entries: dict[str, FunctionEntry] = {}
    for name, group in groups.items():
        plain = [d for d in group if isinstance(d, FuncDef) and d.kind == "plain"]
        base = [d for d in group if isinstance(d, FuncDef) and d.kind == "base"]
        recur = [d for d in group if isinstance(d, FuncDef) and d.kind == "recur"]
        external = [d for d in group if isinstance(d, ExternalDef)]
        if len(plain) > 1 or len(base) > 1 or len(recur) > 1 or len(external) > 1:
            raise _err(group[-1], "duplicate definition of %s in %s" % (name, where))
        if external and (plain or base or recur):
            raise _err(group[-1], "%s is defined both externally and locally in %s"
                       % (name, where))
        if plain and (base or recur):
            raise _err(group[-1], "%s mixes a plain definition with base/recur in %s"
                       % (name, where))
        if external:
            d = external[0]
            entries[name] = FunctionEntry(name, d.params, "external", module_key,
                                          external_decl=d)
        elif recur:
            if not base:
                raise _err(recur[0], "recur definition of %s has no base definition"
                           % name)
            if len(base[0].params) != len(recur[0].params):
                raise _err(recur[0], "base and recur definitions of %s disagree on"
                           " parameters" % name)
            entries[name] = FunctionEntry(
                name, recur[0].params, "recursive", module_key,
                base_body=base[0].body, recur_body=recur[0].body,
                bound=recur[0].bound)
        elif base:
            # A base definition without a recur twin acts as a plain function.
            entries[name] = FunctionEntry(name, base[0].params, "plain", module_key,
                                          plain_body=base[0].body)
        else:
            d = plain[0]
            entries[name] = FunctionEntry(name, d.params, "plain", module_key,
                                          plain_body=d.body)
    return entries


def _err(node, message: str) -> LinkError:
    pos = getattr(node, "pos", None)
    if pos:
        return LinkError(message, line=pos[0], col=pos[1])
    return LinkError(message)


class _Linker:
    def __init__(self, loader, registry: ExternalFunctionRegistry):
        self.loader = loader
        self.registry = registry
        self.scopes: dict[str, ModuleScope] = {}
        self.loading: list[str] = []

    # -- module graph --------------------------------------------------------

    def load_module(self, path: str, importer_key: str | None) -> str:
        key, text = self.loader.load(path, importer_key)
        if key in self.loading:
            raise LinkError("import cycle: %s" % " -> ".join(self.loading + [key]))
        if key in self.scopes:
            return key
        self.loading.append(key)
        try:
            module = parse_module(text, path, filename=key)
            scope = self._build_scope(key, module)
            self.scopes[key] = scope
            self._resolve_scope(scope)
        finally:
            self.loading.pop()
        return key

    def _build_scope(self, key: str, module: Module) -> ModuleScope:
        scope = ModuleScope(key, module)
        for imp in module.imports:
            ns = _namespace_for(imp)
            if ns in scope.aliases:
                raise _err(imp, "namespace collision: %s" % ns)
            scope.aliases[ns] = self.load_module(imp.path, key)
        scope.functions = _group_definitions(module.definitions, key,
                                             "module '%s'" % module.path)
        self._bind_externals(scope)
        return scope

    def _bind_externals(self, scope: ModuleScope) -> None:
        for entry in scope.functions.values():
            if entry.kind != "external":
                continue
            decl = entry.external_decl
            fn = self.registry.lookup(decl.implemented_by)
            if fn is None:
                raise _err(decl, "external function not registered: %s"
                           % decl.implemented_by)
            entry.host_fn = fn

    # -- call resolution -------------------------------------------------------

    def _resolve_scope(self, scope: ModuleScope) -> None:
        for entry in scope.functions.values():
            for body in (entry.plain_body, entry.base_body, entry.recur_body):
                if body is not None:
                    self._resolve_path(body, scope, [])

    def _resolve_path(self, node, scope: ModuleScope, locals_stack: list) -> None:
        if isinstance(node, Call):
            self._resolve_call(node, scope, locals_stack)
        if isinstance(node, Block):
            block_defs = [el for el in node.elements if isinstance(el, FuncDef)]
            frame = _group_definitions(block_defs, scope.key, "a block") \
                if block_defs else {}
            inner = locals_stack + [frame] if frame else locals_stack
            for el in node.elements:
                if isinstance(el, (VarDef, CollDef)):
                    self._resolve_path(el.path, scope, inner)
                elif isinstance(el, FuncDef):
                    self._resolve_path(el.body, scope, inner)
                else:
                    self._resolve_path(el, scope, inner)
            return
        for child in child_paths(node):
            self._resolve_path(child, scope, locals_stack)

    def _resolve_call(self, call: Call, scope: ModuleScope, locals_stack: list) -> None:
        entry = None
        if call.namespace is not None:
            target_key = scope.aliases.get(call.namespace)
            if target_key is None:
                raise _err(call, "unknown namespace: %s" % call.namespace)
            entry = self.scopes[target_key].functions.get(call.name)
            if entry is None:
                raise _err(call, "unresolved function: %s::%s"
                           % (call.namespace, call.name))
        else:
            for frame in reversed(locals_stack):
                if call.name in frame:
                    entry = frame[call.name]
                    break
            if entry is None:
                entry = scope.functions.get(call.name)
            if entry is None and call.name in BUILTINS:
                builtin = BUILTINS[call.name]
                entry = FunctionEntry(call.name, [], "builtin", "<builtin>",
                                      builtin=builtin)
            if entry is None:
                raise _err(call, "unresolved function: %s" % call.name)
        if len(call.args) != entry.arity:
            raise _err(call, "%s takes %d argument%s, got %d"
                       % (call.name, entry.arity,
                          "" if entry.arity == 1 else "s", len(call.args)))
        call.target = entry


def link_query(source: str, *, loader=None, registry: ExternalFunctionRegistry | None = None,
               filename: str | None = None) -> Program:
    """Parse and link a query: every Call gets a resolved target.

    `loader` supplies imported module text (FileModuleLoader or
    MappingModuleLoader); `registry` supplies host functions for
    `external def` declarations that are actually referenced.
    """
    imports, defs, root = parse_query(source, filename)
    linker = _Linker(loader or FileModuleLoader(), registry or default_registry)
    key = _query_key(filename)
    scope = ModuleScope(key, Module(key, imports, defs))
    linker.scopes[key] = scope
    linker.loading.append(key)
    try:
        for imp in imports:
            ns = _namespace_for(imp)
            if ns in scope.aliases:
                raise _err(imp, "namespace collision: %s" % ns)
            scope.aliases[ns] = linker.load_module(imp.path, key)
    finally:
        linker.loading.pop()
    scope.functions = _group_definitions(defs, key, "the query")
    linker._bind_externals(scope)
    linker._resolve_scope(scope)
    linker._resolve_path(root, scope, [])
    return Program(root, imports, defs, linker.scopes)
