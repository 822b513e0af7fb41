import pytest

from pathquery import LinkError
from pathquery.stdlib import ExternalFunctionRegistry
from pathquery.syntax import (FileModuleLoader, MappingModuleLoader,
                              link_query)
from pathquery.syntax.nodes import Call
from pathquery.values import Double


def walk_calls(node, out):
    from pathquery.syntax.nodes import child_paths
    if isinstance(node, Call):
        out.append(node)
    for child in child_paths(node):
        walk_calls(child, out)
    return out


class TestImports:
    def test_namespaced_call_resolves(self, fixtures_dir):
        program = link_query(
            (fixtures_dir / "attractions_v2.pq").read_text(),
            loader=FileModuleLoader([fixtures_dir]))
        calls = walk_calls(program.root, [])
        get_info = [c for c in calls if c.name == "GetInfo"][0]
        assert get_info.target is not None
        assert get_info.target.kind == "plain"

    def test_alias_namespace(self):
        loader = MappingModuleLoader({"util.pq": "def F() { /a }"})
        program = link_query("import 'util.pq' into u\nu::F()", loader=loader)
        call = walk_calls(program.root, [])[0]
        assert call.target.kind == "plain"

    def test_stem_namespace_default(self):
        loader = MappingModuleLoader({"util.pq": "def F() { /a }"})
        link_query("import 'util.pq'\nutil::F()", loader=loader)

    def test_missing_module(self):
        with pytest.raises(LinkError, match="module not found: events.pq"):
            link_query("import 'events.pq'\n5", loader=MappingModuleLoader({}))

    def test_import_cycle(self):
        loader = MappingModuleLoader({
            "a.pq": "import 'b.pq'\ndef A() { /x }",
            "b.pq": "import 'a.pq'\ndef B() { /x }",
        })
        with pytest.raises(LinkError, match="cycle"):
            link_query("import 'a.pq'\n5", loader=loader)

    def test_query_importing_itself(self, tmp_path):
        query = tmp_path / "self.pq"
        query.write_text("import 'self.pq'\n5")
        with pytest.raises(LinkError, match="cycle"):
            link_query(query.read_text(), loader=FileModuleLoader([tmp_path]),
                       filename=str(query))

    def test_namespace_collision(self):
        loader = MappingModuleLoader({"a.pq": "def F() { /x }",
                                      "b.pq": "def G() { /x }"})
        with pytest.raises(LinkError, match="collision"):
            link_query("import 'a.pq' into m\nimport 'b.pq' into m\n5",
                       loader=loader)

    def test_diamond_import_is_fine(self):
        loader = MappingModuleLoader({
            "a.pq": "import 'c.pq'\ndef A() { c::C() }",
            "b.pq": "import 'c.pq'\ndef B() { c::C() }",
            "c.pq": "def C() { /x }",
        })
        link_query("import 'a.pq'\nimport 'b.pq'\na::A().b::B()", loader=loader)


class TestResolution:
    def test_unresolved_function(self):
        with pytest.raises(LinkError, match="unresolved function: Nope"):
            link_query("Nope()")

    def test_unknown_namespace(self):
        with pytest.raises(LinkError, match="unknown namespace"):
            link_query("st::F()")

    def test_arity_mismatch(self):
        with pytest.raises(LinkError, match="argument"):
            link_query("def F(?a) { ?a }\nF()")

    def test_builtin_resolves(self):
        program = link_query("/name.[TextLang() == 'en']")
        calls = walk_calls(program.root, [])
        assert calls[0].target.kind == "builtin"

    def test_local_shadows_builtin(self):
        program = link_query("def TextLang() { /x }\nTextLang()")
        call = walk_calls(program.root, [])[0]
        assert call.target.kind == "plain"

    def test_block_local_function(self):
        program = link_query("{ def Helper() { /a }; Helper() }")
        call = walk_calls(program.root, [])[0]
        assert call.target.kind == "plain"

    def test_block_local_not_visible_outside(self):
        with pytest.raises(LinkError, match="unresolved"):
            link_query("{ def Helper() { /a }; /x }.Helper()")


class TestRecursionPairing:
    def test_pairing(self, fixtures_dir):
        program = link_query((fixtures_dir / "bounded.pq").read_text())
        call = [c for c in walk_calls(program.root, [])
                if c.name == "Classification"][0]
        assert call.target.kind == "recursive"
        assert call.target.bound == 10

    def test_recur_without_base_rejected(self, fixtures_dir):
        # bounded.pq with its base definition deleted must not link.
        lines = (fixtures_dir / "bounded.pq").read_text().splitlines()
        mutated = "\n".join(lines[:7] + lines[10:])
        assert "def base" not in mutated
        with pytest.raises(LinkError, match="no base definition"):
            link_query(mutated)

    def test_base_recur_arity_must_match(self):
        text = ("def base F(?a) { ?a }\n"
                "def recur<3> F() { /x }\n"
                "F('v')")
        with pytest.raises(LinkError, match="parameters"):
            link_query(text)

    def test_duplicate_plain_definitions(self):
        with pytest.raises(LinkError, match="duplicate"):
            link_query("def F() { /a }\ndef F() { /b }\n5")


class TestExternals:
    def test_unregistered_external_referenced(self):
        text = ("external def Missing(?a) implemented_by 'Missing'\n"
                "Missing(5)")
        with pytest.raises(LinkError, match="not registered: Missing"):
            link_query(text, registry=ExternalFunctionRegistry())

    def test_registered_external_links(self):
        registry = ExternalFunctionRegistry()
        registry.register("Dist", lambda xs: [Double(1.0)])
        text = ("external def D(?a) implemented_by 'Dist'\n"
                "D(5)")
        program = link_query(text, registry=registry)
        call = walk_calls(program.root, [])[0]
        assert call.target.kind == "external"
