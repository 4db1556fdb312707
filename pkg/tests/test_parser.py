from fractions import Fraction

import pytest

from emb_engine.errors import ParseError
from emb_engine.fn_rep import FinCod, FnLim, OmegaPlusOneCod, Periodic, RationalsCod, W, d0, d1
from emb_engine.graph import graph_from_edges
from emb_engine.parser import (
    format_codomain,
    format_fn,
    format_graph,
    format_set,
    format_term,
    format_value,
    load_fn,
    load_term,
    parse_codomain,
    parse_fn,
    parse_graph,
    parse_set,
    parse_term,
    parse_value,
    tokenize,
)
from emb_engine.set_rep import Alt, SetLim, SetPt
from emb_engine.space_term import Fin, Lim, Omega, PairsPlus, Pt, Sum, lim_power


class TestTerms:
    @pytest.mark.parametrize("text, term", [
        ("pt", Pt()),
        ("fin(3)", Fin(3)),
        ("omega", Omega()),
        ("pairs+", PairsPlus()),
        ("lim(lim(pt))", lim_power(2)),
        ("sum(lim(pt), fin(2), omega)", Sum((Lim(Pt()), Fin(2), Omega()))),
    ])
    def test_parse_and_print(self, text, term):
        assert parse_term(text) == term
        assert format_term(term) == text

    def test_whitespace(self):
        assert parse_term(" lim (\n pt ) ") == Lim(Pt())

    def test_error_position(self):
        with pytest.raises(ParseError) as err:
            parse_term("lim(\n  cube)")
        assert (err.value.line, err.value.column) == (2, 3)

    def test_domain_errors_become_parse_errors(self):
        with pytest.raises(ParseError):
            parse_term("lim(omega)")
        with pytest.raises(ParseError):
            parse_term("fin(0)")

    def test_trailing_input(self):
        with pytest.raises(ParseError):
            parse_term("pt pt")

    def test_stray_character(self):
        with pytest.raises(ParseError):
            tokenize("lim(pt)#")


class TestValues:
    @pytest.mark.parametrize("text, value", [
        ("w", W), ("0", 0), ("17", 17), ("-1/4", Fraction(-1, 4)), ("6/3", 2),
    ])
    def test_values(self, text, value):
        assert parse_value(text) == value

    def test_print(self):
        assert format_value(W) == "w"
        assert format_value(Fraction(3, 8)) == "3/8"

    def test_zero_denominator(self):
        with pytest.raises(ParseError):
            parse_value("1/0")

    @pytest.mark.parametrize("cod", [OmegaPlusOneCod(), RationalsCod(), FinCod(3)])
    def test_codomains(self, cod):
        assert parse_codomain(format_codomain(cod)) == cod


class TestFunctions:
    def test_d0(self):
        f = parse_fn("fn over lim(pt) -> fin(2) { inf: 1, tail: 0 }")
        assert f == d0()

    def test_d1(self):
        f = parse_fn("fn over lim(pt) -> nat { inf: 0, tail: approach(base=1) }")
        assert f == d1()

    def test_exceptions_are_filled(self):
        f = parse_fn("fn over lim(pt) -> fin(3) { inf: 0, exc: {2: 1}, tail: 0 }")
        assert [n for n, _ in f.body.exc] == [0, 1, 2]

    def test_rationals(self):
        text = "fn over lim(pt) -> Q { inf: 1/2, tail: approach(base=0, sign=1, limit=1/2) }"
        f = parse_fn(text)
        assert f.body.tail.desc.limit == Fraction(1, 2)
        assert parse_fn(format_fn(f)) == f

    def test_parity_tail(self):
        f = parse_fn("fn over lim(pt) -> fin(2) { inf: 0, tail: parity(0, 1) }")
        assert isinstance(f.body.tail, Periodic)

    def test_uniform_constant_tail_collapses(self):
        f = parse_fn("fn over lim(lim(pt)) -> fin(2) { inf: 0, tail: uniform({ inf: 0, tail: 0 }) }")
        assert not isinstance(f.body.tail, Periodic)

    @pytest.mark.parametrize("text", [
        "fn over pt -> omega+1 w",
        "fn over fin(3) -> nat [4, 0, 2]",
        "fn over omega -> nat { exc: {0: 3}, tail: approach(base=0) }",
        "fn over sum(lim(pt), pt) -> fin(2) {[0]: { inf: 1, tail: 0 }, [1]: 0}",
        "fn over lim(lim(pt)) -> omega+1 { inf: w, exc: {1: { inf: 3, tail: 3 }}, "
        "tail: uniform({ inf: w, tail: approach(base=0) }) }",
        "fn over lim(lim(pt)) -> fin(2) { inf: 0, tail: parity({ inf: 1, tail: 0 }, { inf: 0, tail: 0 }) }",
    ])
    def test_print_then_parse(self, text):
        f = parse_fn(text)
        assert parse_fn(format_fn(f)) == f

    def test_value_outside_codomain(self):
        with pytest.raises(ParseError):
            parse_fn("fn over lim(pt) -> fin(2) { inf: 2, tail: 0 }")

    def test_missing_tail(self):
        with pytest.raises(ParseError):
            parse_fn("fn over lim(pt) -> fin(2) { inf: 1 }")

    def test_wrong_branch_count(self):
        with pytest.raises(ParseError):
            parse_fn("fn over sum(pt, pt) -> fin(2) {[0]: 1}")

    def test_pairs_domain(self):
        with pytest.raises(ParseError):
            parse_fn("fn over pairs+ -> fin(2) 0")


class TestSets:
    def test_odds(self):
        t, s = parse_set("set over lim(pt) { inf: false, tail: parity(odd) }")
        assert t == Lim(Pt())
        assert s == SetLim(False, (), Alt(SetPt(False), SetPt(True)))
        assert format_set(t, s) == "set over lim(pt) { inf: false, tail: parity(odd) }"

    def test_exception_matching_the_tail_is_dropped(self):
        _, s = parse_set("set over lim(pt) { inf: true, exc: {0: true}, tail: true }")
        assert s == SetLim(True, (), SetPt(True))

    @pytest.mark.parametrize("text", [
        "set over pt true",
        "set over fin(3) [true, false, true]",
        "set over sum(lim(pt), pt) {[0]: { inf: true, tail: false }, [1]: false}",
        "set over lim(lim(pt)) { inf: true, exc: {1: { inf: false, tail: true }}, "
        "tail: alt({ inf: true, tail: false }, { inf: false, tail: parity(even) }) }",
    ])
    def test_print_then_parse(self, text):
        t, s = parse_set(text)
        assert parse_set(format_set(t, s)) == (t, s)

    def test_sets_need_compact_terms(self):
        with pytest.raises(ParseError):
            parse_set("set over omega true")


class TestGraphs:
    def test_round_trip(self, triangle):
        assert parse_graph(format_graph(triangle)) == triangle

    def test_bad_json_position(self):
        with pytest.raises(ParseError) as err:
            parse_graph('{"support": 2,\n "edges": [[0, 1]')
        assert err.value.line == 2

    def test_printed_form_is_stable(self):
        g = graph_from_edges(3, [(2, 1), (0, 1)])
        assert format_graph(g) == '{"edges": [[0, 1], [1, 2]], "support": 3}'


class TestFiles:
    def test_load(self, tmp_path):
        (tmp_path / "t.txt").write_text("lim(pt)\n")
        (tmp_path / "f.txt").write_text("fn over lim(pt) -> fin(2) {\n  inf: 1,\n  tail: 0\n}\n")
        assert load_term(str(tmp_path / "t.txt")) == Lim(Pt())
        f = load_fn(str(tmp_path / "f.txt"))
        assert isinstance(f.body, FnLim)

    def test_missing(self, tmp_path):
        with pytest.raises(FileNotFoundError, match="Input file not found"):
            load_term(str(tmp_path / "missing.txt"))
