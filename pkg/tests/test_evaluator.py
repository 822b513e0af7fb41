import pytest

from pathquery import EvalError, eval_path, eval_query, link_query, load_graph
from pathquery.stdlib import ExternalFunctionRegistry
from pathquery.syntax import FileModuleLoader, MappingModuleLoader
from pathquery.values import (Bool, Double, Id, Int, Record, String, Text,
                              equals)

from conftest import bag

MOMA = Id("/z/moma")
FUN = Id("/z/fun")
GHOST = Id("/z/ghost")


def run(text, graph, **kwargs):
    return eval_query(link_query(text, **{k: v for k, v in kwargs.items()
                                          if k in ("loader", "registry")}),
                      graph,
                      params=kwargs.get("params"),
                      roots=kwargs.get("roots"))


class TestEvalQuery:
    def test_attractions_v1_mapping(self, g1, fixtures_dir):
        res = run((fixtures_dir / "attractions_v1.pq").read_text(), g1)
        assert bag(res.pairs) == bag([
            (MOMA, Text("MoMA", "en")),
            (MOMA, Text("MoMA", "es")),
            (FUN, Text("FunPark", "en")),
        ])
        assert res.total == 3

    def test_literal_query_maps_to_itself(self, g1):
        res = run("5", g1)
        assert res.pairs == [(Int(5), Int(5))]

    def test_ghost_absent_without_names(self, g1, fixtures_dir):
        res = run((fixtures_dir / "attractions_v1.pq").read_text(), g1)
        assert GHOST not in res.roots()


class TestSources:
    def test_entities_counts(self, g1):
        assert len(eval_path("@entities", g1, [Int(0)])) == 7

    def test_roots_supplied(self, g1):
        res = run("@roots./name", g1, roots=[MOMA])
        assert bag(res.outputs()) == bag([Text("MoMA", "en"), Text("MoMA", "es")])

    def test_roots_default_to_entities(self, g1):
        with_roots = run("@roots", g1)
        with_entities = run("@entities", g1)
        assert bag(with_roots.pairs) == bag(with_entities.pairs)

    def test_literal_once_per_input(self, g1):
        assert eval_path("5", g1, [Int(1), Int(2)]) == [Int(5), Int(5)]

    def test_record_root_rejected(self, g1):
        with pytest.raises(EvalError, match="cannot be roots"):
            run("{ f: 5 }", g1)


class TestPredicates:
    def test_forward(self, g1):
        assert bag(eval_path("/name", g1, [MOMA])) == \
            bag([Text("MoMA", "en"), Text("MoMA", "es")])

    def test_reverse(self, g1):
        assert eval_path("!/exhibit", g1, [Id("/z/e1")]) == [MOMA]

    def test_non_entity_input(self, g1):
        assert eval_path("/name", g1, [Int(7)]) == []

    def test_multiplicity_preserved(self, g1):
        out = eval_path("/type", g1, [MOMA, MOMA])
        assert out == [Id("/museum"), Id("/museum")]


class TestDot:
    def test_exhibit_price(self, g1):
        assert eval_path("/exhibit./price", g1, [MOMA]) == [Int(25)]

    def test_composition_associativity(self, g1):
        nodes = g1.all_entities()
        left = eval_path("/type./name", g1, nodes)
        mid = eval_path("/type", g1, nodes)
        right = eval_path("/name", g1, mid)
        assert bag(left) == bag(right)

    def test_empty_input(self, g1):
        assert eval_path("/name./type", g1, []) == []


class TestFilters:
    def test_require_name_on_ghost(self, g1):
        assert eval_path("require(/name)", g1, [GHOST]) == []

    def test_prohibit_permanently_closed(self, g1):
        out = eval_path("prohibit(/permanently_closed.[?cur])", g1, [FUN, MOMA])
        assert out == [MOMA]

    def test_prohibit_keeps_explicit_false(self):
        g = load_graph("/z/a\t/permanently_closed\tfalse\n")
        out = eval_path("prohibit(/permanently_closed.[?cur])", g, [Id("/z/a")])
        assert out == [Id("/z/a")]

    def test_where_false_literal_drops_everything(self, g1):
        assert eval_path("[false]", g1, [MOMA, Int(1)]) == []

    def test_where_keeps_any_truthy(self, g1):
        assert eval_path("[/type]", g1, [MOMA, Id("/z/e1")]) == [MOMA]

    def test_optional_passes_outputs_or_input(self, g1):
        assert bag(eval_path("optional(/name)", g1, [MOMA])) == \
            bag([Text("MoMA", "en"), Text("MoMA", "es")])
        assert eval_path("optional(/name)", g1, [GHOST]) == [GHOST]


class TestTuple:
    def test_exhibit_or_ride(self, g1):
        assert eval_path("(/exhibit, /ride)", g1, [MOMA]) == [Id("/z/e1")]
        assert eval_path("(/exhibit, /ride)", g1, [FUN]) == [Id("/z/r1")]

    def test_single_branch_equals_plain(self, g1):
        assert eval_path("(/name)", g1, [MOMA]) == eval_path("/name", g1, [MOMA])

    def test_branch_order(self, g1):
        out = eval_path("(/name, /type)", g1, [MOMA])
        assert out == [Text("MoMA", "en"), Text("MoMA", "es"), Id("/museum")]


class TestBlock:
    def test_multiplicative_cardinality(self, g1):
        out = eval_path("{ /name; /type }", g1, [MOMA])
        assert out == [Id("/museum"), Id("/museum")]

    def test_filtering_element(self, g1):
        assert eval_path("{ require(/name); ?cur }", g1, [GHOST]) == []

    def test_single_element_is_plain(self, g1):
        assert eval_path("{ /name }", g1, [MOMA]) == eval_path("/name", g1, [MOMA])

    def test_cur_is_block_input(self, g1):
        out = eval_path("{ /name; ?cur }", g1, [MOMA])
        assert out == [MOMA, MOMA]

    def test_var_def_fans_out(self, g1):
        out = eval_path("{ def ?x /name; ?x }", g1, [MOMA])
        assert bag(out) == bag([Text("MoMA", "en"), Text("MoMA", "es")])

    def test_var_def_empty_leaves_unbound(self, g1):
        assert eval_path("{ def ?x /name; ?x }", g1, [GHOST]) == []
        assert eval_path("{ def ?x /name; 7 }", g1, [GHOST]) == [Int(7)]

    def test_required_coll_def_aborts(self, g1):
        text = "{ require def $p /name; Count($p) }"
        assert eval_path(text, g1, [GHOST]) == []
        assert eval_path(text, g1, [MOMA]) == [Int(2)]

    def test_coll_def_scoped_to_block(self, g1):
        out = eval_path("{ { def $p /name; Count($p) }; Count($p) }", g1, [MOMA])
        assert out == [Int(0)]

    def test_mean_price_pattern(self, g1):
        text = "{ require def $prices /exhibit./price; Sum($prices) / Count($prices) }"
        assert eval_path(text, g1, [MOMA]) == [Double(25.0)]


class TestClassify:
    CLASSIFY = ("classify { [/type == Id('/museum')]: { /exhibit } "
                "[/type == Id('/theme_park')]: { /ride } }")

    def test_museum_routes_to_exhibit(self, g1):
        assert eval_path(self.CLASSIFY, g1, [MOMA]) == [Id("/z/e1")]

    def test_theme_park_routes_to_ride(self, g1):
        assert eval_path(self.CLASSIFY, g1, [FUN]) == [Id("/z/r1")]

    def test_implicit_default_outputs_input(self, g1):
        assert eval_path(self.CLASSIFY, g1, [Int(7)]) == [Int(7)]

    def test_explicit_else(self, g1):
        text = "classify { [/type == Id('/museum')]: { /exhibit } else: { 0 } }"
        assert eval_path(text, g1, [Int(7)]) == [Int(0)]

    def test_first_match_wins(self, g1):
        text = "classify { [/type]: { 1 } [/name]: { 2 } }"
        assert eval_path(text, g1, [MOMA]) == [Int(1)]


class TestCompare:
    def test_type_membership(self, g1):
        text = "/type == (Id('/museum'), Id('/theme_park'))"
        assert eval_path(text, g1, [MOMA]) == [Bool(True)]

    def test_mismatch(self, g1):
        assert eval_path("/type == Id('/museum')", g1, [FUN]) == [Bool(False)]

    def test_both_sides_empty_is_false(self, g1):
        assert eval_path("/name == /name", g1, [GHOST]) == [Bool(False)]

    def test_one_bool_per_input(self, g1):
        assert len(eval_path("/name == /name", g1, [MOMA, FUN, GHOST])) == 3


class TestArith:
    def test_int_division_yields_double(self, g1):
        assert eval_path("55 / 2", g1, [Int(0)]) == [Double(27.5)]

    def test_int_multiplication(self, g1):
        assert eval_path("2 * 3", g1, [Int(0)]) == [Int(6)]

    def test_division_by_zero_suppressed(self, g1):
        assert eval_path("1 / 0", g1, [Int(0)]) == []

    def test_double_division_by_zero_is_ieee(self, g1):
        assert eval_path("1 / 0.0", g1, [Int(0)]) == [Double(float("inf"))]

    def test_non_numeric_pairs_yield_nothing(self, g1):
        assert eval_path("'x' + 1", g1, [Int(0)]) == []

    def test_overflow_is_an_error(self, g1):
        with pytest.raises(EvalError, match="overflow"):
            eval_path("9223372036854775807 + 1", g1, [Int(0)])

    def test_mixed_promotes_to_double(self, g1):
        assert eval_path("1 + 0.5", g1, [Int(0)]) == [Double(1.5)]

    def test_cross_product(self, g1):
        out = eval_path("(1, 2) * (10, 100)", g1, [Int(0)])
        assert out == [Int(10), Int(100), Int(20), Int(200)]


class TestAggregates:
    def test_count_including_zero(self, g1):
        assert eval_path("Count(/name)", g1, [MOMA]) == [Int(2)]
        assert eval_path("Count(/name)", g1, [GHOST]) == [Int(0)]

    def test_count_exactly_one_per_input(self, g1):
        assert len(eval_path("Count(/name)", g1, list(g1.all_entities()))) == 7

    def test_sum(self, g1):
        out = eval_path("Sum((/exhibit, /ride)./price)", g1, [MOMA, FUN])
        assert out == [Int(25), Int(30)]

    def test_sum_non_numeric_suppressed(self, g1):
        assert eval_path("Sum((1, 'x'))", g1, [Int(0)]) == []

    def test_min_max(self, g1):
        assert eval_path("Min((3, 1, 2))", g1, [Int(0)]) == [Int(1)]
        assert eval_path("Max((3, 1, 2))", g1, [Int(0)]) == [Int(3)]
        assert eval_path("Min(/name)", g1, [GHOST]) == []


class TestCollectionOps:
    def test_sort_ascending(self, g1):
        assert eval_path("Sort((3, 1, 2))", g1, [Int(0)]) == \
            [Int(1), Int(2), Int(3)]

    def test_top_two_smallest(self, g1):
        assert bag(eval_path("Top((3, 1, 2), 2)", g1, [Int(0)])) == \
            bag([Int(1), Int(2)])

    def test_rtop_descending(self, g1):
        assert bag(eval_path("Rtop((3, 1, 2), 2)", g1, [Int(0)])) == \
            bag([Int(3), Int(2)])

    def test_descending_key_sees_candidate_as_cur(self, g1):
        assert eval_path("Sort((1, 3, 2), -?cur)", g1, [Int(0)]) == \
            [Int(3), Int(2), Int(1)]

    def test_dedup_respects_language_tags(self, g1):
        text = "Dedup((Text('a', 'en'), Text('a', 'en'), Text('a', 'fr')))"
        assert bag(eval_path(text, g1, [Int(0)])) == \
            bag([Text("a", "en"), Text("a", "fr")])

    def test_dedup_numeric_equality(self, g1):
        assert eval_path("Dedup((5, Double('5'), 5))", g1, [Int(0)]) == [Int(5)]

    def test_slice_skips_then_takes(self, g1):
        assert eval_path("Slice((1, 2, 3, 4), 2, 1)", g1, [Int(0)]) == \
            [Int(2), Int(3)]

    def test_slice_without_offset(self, g1):
        assert eval_path("Slice((1, 2, 3), 2)", g1, [Int(0)]) == [Int(1), Int(2)]

    def test_sort_stability_on_records(self, g1):
        text = "Sort(({ f: 2 }, { f: 1 }))"
        out = eval_path(text, g1, [Int(0)])
        assert out == [Record.of([("f", Int(2))]), Record.of([("f", Int(1))])]

    def test_sort_records_by_field_key(self, g1):
        text = "Sort(({ f: 2 }, { f: 1 }), ?cur->f)"
        out = eval_path(text, g1, [Int(0)])
        assert out == [Record.of([("f", Int(1))]), Record.of([("f", Int(2))])]


class TestRecords:
    REQUIRED = "{ id: ?cur require name: /name.[TextLang() == 'en'] }"

    def test_required_field_empty_no_record(self, g1):
        assert eval_path(self.REQUIRED, g1, [GHOST]) == []

    def test_moma_record(self, g1):
        out = eval_path(self.REQUIRED, g1, [MOMA])
        assert out == [Record.of([("id", MOMA), ("name", Text("MoMA", "en"))])]

    def test_merge_splices_fields(self, g1):
        out = eval_path("{ @merge: { open: true } }", g1, [Int(1)])
        assert out == [Record.of([("open", Bool(True))])]

    def test_empty_merge_does_not_block(self, g1):
        out = eval_path("{ id: ?cur @merge: /nope.{ f: ?cur } }", g1, [MOMA])
        assert out == [Record.of([("id", MOMA)])]

    def test_all_fields_empty_no_record(self, g1):
        assert eval_path("{ f: /nope }", g1, [MOMA]) == []

    def test_non_record_merge_is_an_error(self, g1):
        with pytest.raises(EvalError, match="@merge"):
            eval_path("{ @merge: 5 }", g1, [Int(1)])

    def test_merge_appends_to_existing_field(self, g1):
        out = eval_path("{ f: 1 @merge: { f: 2 } }", g1, [Int(0)])
        assert out == [Record.of([("f", [Int(1), Int(2)])])]

    def test_optional_field_omitted(self, g1):
        out = eval_path("{ id: ?cur extra: /nope }", g1, [MOMA])
        assert out == [Record.of([("id", MOMA)])]


class TestFieldAccess:
    def test_simple(self, g1):
        assert eval_path("{ f: 5 }->f", g1, [Int(0)]) == [Int(5)]

    def test_non_record_input_outputs_nothing(self, g1):
        assert eval_path("5->f", g1, [Int(0)]) == []

    def test_multi_valued_chase(self, g1):
        text = "{ a: ({ b: 1 }, { b: 2 }) }->a->b"
        assert eval_path(text, g1, [Int(0)]) == [Int(1), Int(2)]

    def test_intermediate_non_records_discarded(self, g1):
        text = "{ a: ({ b: 1 }, 9) }->a->b"
        assert eval_path(text, g1, [Int(0)]) == [Int(1)]


class TestBindAndVars:
    def test_bind_outputs_its_input(self, g1):
        out = eval_path("/exhibit.bind(?e)", g1, [MOMA])
        assert out == [Id("/z/e1")]

    def test_bound_value_reappears(self, g1):
        out = eval_path("{ /exhibit./price.bind(?p); ?p }", g1, [MOMA])
        assert out == [Int(25)]

    def test_unbound_variable_outputs_nothing(self, g1):
        assert eval_path("?nope", g1, [MOMA]) == []

    def test_bind_survives_top_and_root(self, g1):
        text = ("Top(@entities.{ require(/name); Count(/name).bind(?n) }, 5, ?root)"
                ".?root.{ id: ?cur names: ?n }")
        res = run(text, g1)
        by_id = {r: v for r, v in res.pairs}
        assert by_id[MOMA].get("names") == (Int(2),)

    def test_root_ref(self, g1):
        res = run("@entities.require(/name).?root", g1)
        assert all(equals(r, v) for r, v in res.pairs)

    def test_params_global_inside_functions(self, g1):
        params = Record.of([("day", String("F"))])
        res = run("def F() { ?params->day }\n@entities.[/type].F()", g1,
                  params=params)
        assert set(res.outputs()) == {String("F")}

    def test_params_absent_outputs_nothing(self, g1):
        assert eval_path("?params", g1, [Int(0)]) == []


class TestCalls:
    def test_function_body_runs_on_call_input(self, g1):
        res = run("def EnglishName() { /name.[TextLang() == 'en'] }\n"
                  "@entities.EnglishName()", g1)
        assert bag(res.outputs()) == bag([Text("MoMA", "en"),
                                          Text("FunPark", "en")])

    def test_variable_params_cross_product(self, g1):
        res = run("def Pair(?a, ?b) { (?a, ?b) }\nPair((1, 2), (10, 20))", g1)
        assert bag(res.outputs()) == bag([Int(1), Int(10), Int(1), Int(20),
                                          Int(2), Int(10), Int(2), Int(20)])

    def test_empty_variable_argument_means_no_invocation(self, g1):
        res = run("def F(?a) { 5 }\nF(/nowhere)", g1)
        assert res.total == 0

    def test_collection_param_captures_multiset(self, g1):
        res = run("def Stats($xs) { Count($xs) }\nStats((1, 2, 2))", g1)
        assert res.outputs() == [Int(3)]

    def test_bind_inside_function_stays_inside(self, g1):
        res = run("def F() { /name.bind(?inner) }\n"
                  "@entities.[/type == Id('/museum')].F().?inner", g1)
        assert res.total == 0

    def test_external_receives_collections(self, g1):
        seen = []

        def host(values):
            seen.append(values)
            return [Int(len(values))]

        registry = ExternalFunctionRegistry()
        registry.register("Probe", host)
        res = run("external def Probe($xs) implemented_by 'Probe'\n"
                  "Probe((1, 2, 3))", g1, registry=registry)
        assert res.outputs() == [Int(3)]
        assert seen == [(Int(1), Int(2), Int(3))]

    def test_external_bad_return_is_an_error(self, g1):
        registry = ExternalFunctionRegistry()
        registry.register("Bad", lambda xs: ["oops"])
        with pytest.raises(EvalError, match="non-value"):
            run("external def Bad(?x) implemented_by 'Bad'\nBad(1)", g1,
                registry=registry)


class TestRecursion:
    def test_classifications_stops_at_mammalia(self, g2, fixtures_dir):
        res = run((fixtures_dir / "classifications.pq").read_text(), g2)
        assert res.pairs == [(Id("/z/cat"), Id("/z/mammalia"))]

    def test_self_loop_terminates_empty(self, fixtures_dir):
        loop = load_graph((fixtures_dir / "loop.pqt").read_text())
        res = run((fixtures_dir / "loop_query.pq").read_text(), loop)
        assert res.total == 0

    def test_bound_one_goes_straight_to_base(self, g2):
        text = ("def base F() { 'base' }\n"
                "def recur<1> F() { /higher_classification.F() }\n"
                "Id('/z/cat').F()")
        res = run(text, g2)
        assert res.outputs() == [String("base")]

    def test_bounded_chain_depth(self, g2, fixtures_dir):
        res = run((fixtures_dir / "bounded.pq").read_text(), g2)
        assert res.total == 1
        record = res.pairs[0][1]
        depth = 0
        while True:
            depth += 1
            under = record.get("under")
            if not under:
                break
            record = under[0]
        assert depth == 4

    def test_depth_limits_chain_on_long_graphs(self):
        lines = []
        for i in range(20):
            lines.append("/z/n%d\t/higher_classification\t/z/n%d" % (i, i + 1))
        lines.append("/z/n20\t/rank\t/z/class")
        g = load_graph("\n".join(lines))
        text = ("def base C() { [/rank == Id('/z/class')] }\n"
                "def recur<10> C() { ([/rank == Id('/z/class')],"
                " /higher_classification.C()) }\n"
                "Id('/z/n0').C()")
        # 10 calls deep reaches only /z/n9; the ranked node sits at n20.
        assert run(text, g).total == 0


class TestModulesEndToEnd:
    def test_attractions_v2(self, g1, fixtures_dir, fixture_loader):
        res = run((fixtures_dir / "attractions_v2.pq").read_text(), g1,
                  loader=fixture_loader)
        expected_moma = Record.of([("id", MOMA), ("name", Text("MoMA", "en"))])
        expected_fun = Record.of([("id", FUN), ("name", Text("FunPark", "en"))])
        assert bag(res.pairs) == bag([(MOMA, expected_moma),
                                      (FUN, expected_fun)])

    def test_unit_output_is_an_error(self, g1):
        with pytest.raises(EvalError, match="unit"):
            run("[@entities]", g1)
