import random

import pytest

from pathquery import EvalError, eval_path, load_graph
from pathquery.stdlib import ExternalFunctionRegistry, text_lang
from pathquery.values import Double, Id, Int, String, Text

from randgen import random_scalar_value

EMPTY = load_graph("")


class TestTextLang:
    def test_english_tag(self):
        assert text_lang(Text("MoMA", "en")) == [String("en")]

    def test_plain_string_has_no_tag(self):
        assert text_lang(String("MoMA")) == []

    def test_french_tag(self):
        assert text_lang(Text("Parc familial", "fr")) == [String("fr")]

    def test_never_emits_for_non_text(self):
        rng = random.Random(99)
        for _ in range(300):
            v = random_scalar_value(rng, allow_nan=True)
            out = text_lang(v)
            assert out == ([String(v.lang)] if isinstance(v, Text) else [])

    def test_usable_from_queries(self):
        out = eval_path("TextLang()", EMPTY, [Text("x", "en"), String("x")])
        assert out == [String("en")]


class TestStubs:
    def test_area_intersects_links_but_raises(self):
        with pytest.raises(EvalError, match="not implemented"):
            eval_path("AreaIntersects('a', 'b')", EMPTY, [Int(0)])


class TestRegistry:
    def test_register_then_lookup(self):
        registry = ExternalFunctionRegistry()
        fn = lambda xs: [Double(1.0)]
        registry.register("Distance", fn)
        assert registry.lookup("Distance") is fn

    def test_unregistered_is_absent(self):
        assert ExternalFunctionRegistry().lookup("Missing") is None

    def test_duplicate_registration_rejected(self):
        registry = ExternalFunctionRegistry()
        first = lambda xs: []
        registry.register("D", first)
        with pytest.raises(ValueError, match="already registered"):
            registry.register("D", lambda xs: [Int(1)])
        assert registry.lookup("D") is first  # original remains

    def test_one_collection_per_parameter_in_order(self):
        calls = []

        def host(a, b, c):
            calls.append((a, b, c))
            return []

        registry = ExternalFunctionRegistry()
        registry.register("Triple", host)
        from pathquery import link_query, eval_query
        program = link_query(
            "external def T(?a, $b, ?c) implemented_by 'Triple'\n"
            "T((1, 2), (3, 4), 5)", registry=registry)
        eval_query(program, EMPTY)
        assert calls == [((Int(1), Int(2)), (Int(3), Int(4)), (Int(5),))]
