import pytest

from pathquery import LexError
from pathquery.syntax import tokenize


def kinds(source):
    return [(t.kind, t.value) for t in tokenize(source)[:-1]]


class TestBasics:
    def test_typed_literal_is_plain_tokens(self):
        assert kinds("Id('/z/14znzk')") == [
            ("IDENT", "Id"), ("(", "("), ("STRING", "/z/14znzk"), (")", ")")]

    def test_recur_bound(self):
        assert kinds("recur<10>") == [
            ("KW", "recur"), ("<", "<"), ("INT", 10), (">", ">")]

    def test_reverse_predicate_is_one_token(self):
        assert kinds("!/pred") == [("REVPRED", "/pred")]

    def test_predicate_token(self):
        assert kinds("/permanently_closed") == [("PRED", "/permanently_closed")]

    def test_multi_segment_predicate(self):
        assert kinds("/film/actor") == [("PRED", "/film/actor")]

    def test_sigils(self):
        assert kinds("?cur %c $prices @entities") == [
            ("VAR", "cur"), ("COLL", "c"), ("COLL", "prices"),
            ("AT", "entities")]

    def test_comments_skipped(self):
        assert kinds("5 // This function is defined\n6") == [
            ("INT", 5), ("INT", 6)]

    def test_both_quote_styles(self):
        assert kinds("'single quotes' \"double quotes\"") == [
            ("STRING", "single quotes"), ("STRING", "double quotes")]

    def test_numbers(self):
        assert kinds("5 -2000 5.1 -0.01e-15") == [
            ("INT", 5), ("-", "-"), ("INT", 2000), ("DOUBLE", 5.1),
            ("-", "-"), ("DOUBLE", 0.01e-15)]

    def test_punctuation(self):
        assert kinds("-> == :: . ; :") == [
            ("->", "->"), ("==", "=="), ("::", "::"), (".", "."),
            (";", ";"), (":", ":")]


class TestSlashDisambiguation:
    def test_division_after_close_paren(self):
        assert kinds("Sum($p) / Count($p)")[4] == ("/", "/")

    def test_division_without_spaces(self):
        toks = kinds("Sum($p)/Count($p)")
        assert ("/", "/") in toks
        assert all(k != "PRED" for k, _ in toks)

    def test_predicate_after_dot(self):
        assert kinds("./price") == [(".", "."), ("PRED", "/price")]

    def test_predicate_after_open_bracket(self):
        assert kinds("[/type")[1] == ("PRED", "/type")

    def test_predicate_at_start(self):
        assert kinds("/name")[0] == ("PRED", "/name")

    def test_division_after_literal(self):
        assert kinds("55 / 2") == [("INT", 55), ("/", "/"), ("INT", 2)]

    def test_int_then_dot_predicate(self):
        # '5.' with no digit after the dot stays an Int plus a Dot.
        assert kinds("5./name") == [("INT", 5), (".", "."), ("PRED", "/name")]


class TestPositions:
    def test_line_and_column(self):
        toks = tokenize("@entities\n  ./name")
        assert (toks[0].line, toks[0].col) == (1, 1)
        dot = [t for t in toks if t.kind == "."][0]
        assert (dot.line, dot.col) == (2, 3)


class TestErrors:
    def test_unterminated_string(self):
        with pytest.raises(LexError, match="unterminated"):
            tokenize("'oops")

    def test_invalid_character(self):
        with pytest.raises(LexError):
            tokenize("a ~ b")

    def test_bare_equals(self):
        with pytest.raises(LexError, match="=="):
            tokenize("a = b")

    def test_bang_without_predicate(self):
        with pytest.raises(LexError):
            tokenize("! 5")

    def test_invalid_escape(self):
        with pytest.raises(LexError, match="escape"):
            tokenize(r"'\q'")

    def test_error_carries_position(self):
        with pytest.raises(LexError) as err:
            tokenize("ok\n  'oops")
        assert err.value.line == 2
