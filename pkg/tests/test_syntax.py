import random

import pytest
from hypothesis import given, settings, strategies as st

from chorcheck import formulas as F
from chorcheck.core import INACTION, At, BinOp, Com, Cond, Init, Lit, Rec, RecVar, State, Var, alpha_equal, located
from chorcheck.errors import DuplicateLabel, ParseError
from chorcheck.generators import GeneratorConfig, random_choreography, random_formula, random_state
from chorcheck.pcp import DEMO_INSTANCES, PcpInstance, encode_pcp, pcp_formula
from chorcheck.syntax import (
    parse_choreography,
    parse_document,
    parse_formula,
    parse_session_type,
    parse_state,
    print_choreography,
    print_document,
    print_formula,
    print_session_type,
    print_state,
)
from chorcheck import session_types as T

seeds = st.integers(0, 2**32 - 1)
ROUND_TRIP = GeneratorConfig(recursion=True, sugar=True)


def test_parse_inaction():
    assert parse_choreography("0") == INACTION
    assert print_choreography(INACTION) == "0"


def test_parse_booking_prefix():
    c = parse_choreography("Cust -> AC : ob(k1). Cust -> AC : k1<booking, x>. 0")
    assert c == Init("Cust", "AC", "ob", "k1", Com("Cust", "AC", "k1", Var("booking"), "x", INACTION))


def test_parse_append_shape():
    c = parse_choreography("rec X { if r@B = 1 then B -> A : k<tmp1 . s1, str1>. X else X }")
    assert isinstance(c, Rec)
    cond = c.body
    assert isinstance(cond, Cond)
    assert cond.guard == BinOp("=", located("r", "B"), Lit(1))
    assert cond.then == Com("B", "A", "k", BinOp(".", Var("tmp1"), Var("s1")), "str1", RecVar("X"))
    assert cond.orelse == RecVar("X")


def test_else_if_chains_nest():
    c = parse_choreography("if r@B = 1 then 0 else if r@B = 2 then 0 else 0")
    assert isinstance(c.orelse, Cond)


def test_parse_formula_examples():
    f = parse_formula("exists B:participant . <init A->B a(k)> true")
    assert f == F.Exists("B", F.Sort.PARTICIPANT, F.Action(F.InitL("A", "B", "a", "k"), F.TrueF()))
    assert parse_formula("end") == F.EndF()
    assert parse_formula("may ( str1@A = str2@A & ~(str1@A = eps) & ~(str2@A = eps) )") == pcp_formula()


def test_formula_operators():
    f = parse_formula("box end | ~end => end or end & end")
    assert isinstance(f, F.Implies)
    assert isinstance(f.left, F.ParF)
    assert isinstance(f.right, F.Or) and isinstance(f.right.right, F.And)
    assert parse_formula("x@A != 1@A") == F.Neg(F.Eq(located("x", "A"), At(Lit(1), "A")))
    assert parse_formula("[com A->B k] end") == F.BoxAction(F.ComL("A", "B", "k"), F.EndF())
    assert parse_formula("<branch A->B k [l]> end") == F.Action(F.BranchL("A", "B", "k", "l"), F.EndF())
    assert parse_formula("next end") == F.NextF(F.EndF())


def test_unknown_sort_rejected():
    with pytest.raises(ParseError):
        parse_formula("exists x:colour . end")


def test_parse_state_examples():
    s = parse_state("str1@A = eps, r@B = 1")
    assert s == State.of({("str1", "A"): "", ("r", "B"): 1})
    assert parse_state("") == State()
    s2 = parse_state("x@A = 3, x@B = 4")
    assert len(s2) == 2 and s2.lookup("x", "A") == 3 and s2.lookup("x", "B") == 4
    with pytest.raises(ParseError):
        parse_state("x@A = 1, x@A = 2")


def test_state_round_trip():
    s = State.of({("x", "A"): 'a "quoted" \\ word', ("y", "B"): -3, ("z", "C"): False})
    assert parse_state(print_state(s)) == s


def test_parse_errors_carry_spans():
    with pytest.raises(ParseError) as err:
        parse_choreography("A -> B : a(k).\n  A -> B k<1, x>. 0", file="demo.gc")
    span = err.value.span
    assert (span.file, span.line) == ("demo.gc", 2)
    assert span.column > 1


def test_duplicate_labels_and_unbound_recvar():
    with pytest.raises((ParseError, DuplicateLabel)):
        parse_choreography("A -> B : k[+]{l: 0, l: 0}")
    with pytest.raises(ParseError):
        parse_choreography("A -> B : a(k). X")
    assert parse_choreography("X", closed=False) == RecVar("X")


def test_session_types_round_trip():
    text = "mu t. &{ok: !(int). ?(string). t, quit: +{bye: end}}"
    t = parse_session_type(text)
    assert isinstance(t, T.RecT)
    assert parse_session_type(print_session_type(t)) == t
    with pytest.raises(ParseError):
        parse_session_type("!(int). t")
    with pytest.raises(ParseError):
        parse_session_type("!(float). end")


def test_document_declarations(corpus):
    doc = parse_document((corpus / "response.gc").read_text())
    assert list(doc.choreographies) == ["C1", "C2", "C2_mutated"]
    assert doc.state == State.of({("x", "D"): 42})
    with pytest.raises(ParseError):
        parse_document("chor A = 0; chor A = 0;")


def _doc_round_trip(text):
    doc = parse_document(text)
    again = parse_document(print_document(doc))
    assert again.state == doc.state
    assert again.formulas == doc.formulas
    assert again.types == doc.types
    assert doc.choreographies.keys() == again.choreographies.keys()
    for name, c in doc.choreographies.items():
        assert alpha_equal(c, again.choreographies[name]), name


@pytest.mark.parametrize("name", ["ob.gc", "ob.gl", "response.gc", "response.gl", "connectedness.gl"]
                         + [f"pcp/pcp_n{n}.gc" for n in range(1, 6)])
def test_golden_round_trip(corpus, name):
    _doc_round_trip((corpus / name).read_text())


@pytest.mark.parametrize("n", range(1, 6))
def test_pcp_golden_matches_encoding(corpus, n):
    doc = parse_document((corpus / "pcp" / f"pcp_n{n}.gc").read_text())
    cfg = encode_pcp(PcpInstance.parse(DEMO_INSTANCES[n]))
    assert doc.state == cfg.state
    assert alpha_equal(doc.choreographies[f"pcp{n}"], cfg.chor)


def test_append_round_trip_for_two_pairs():
    c = encode_pcp(PcpInstance.parse("0:1,1:0")).chor
    assert alpha_equal(parse_choreography(print_choreography(c)), c)


@given(seeds)
def test_choreography_round_trip(seed):
    c = random_choreography(random.Random(seed), ROUND_TRIP)
    assert alpha_equal(parse_choreography(print_choreography(c)), c)


@given(seeds)
def test_formula_round_trip(seed):
    rng = random.Random(seed)
    f = random_formula(rng, ROUND_TRIP, random_choreography(rng))
    assert parse_formula(print_formula(f)) == f


@given(seeds)
def test_state_round_trip_random(seed):
    s = random_state(random.Random(seed))
    assert parse_state(print_state(s)) == s


@settings(max_examples=300)
@given(st.text())
def test_parsers_never_crash(text):
    for parse in (parse_choreography, parse_formula, parse_state, parse_document, parse_session_type):
        try:
            parse(text)
        except ParseError as exc:
            assert exc.span.line >= 1 and exc.span.column >= 1


@settings(max_examples=200)
@given(st.binary())
def test_parsers_accept_arbitrary_bytes(data):
    text = data.decode("utf-8", errors="replace")
    try:
        parse_document(text)
    except ParseError:
        pass
