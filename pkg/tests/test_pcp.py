import pytest
from hypothesis import given, settings, strategies as st

from chorcheck import formulas as F
from chorcheck.checker import entails, expand_derived
from chorcheck.core import INACTION, Name, Sort, State, free_names, is_recursion_free
from chorcheck.pcp import (
    PcpInstance,
    bounded_search,
    encode_pcp,
    index_sequence,
    is_genuine,
    pcp_formula,
    replay,
    solution_condition,
)
from chorcheck.semantics import Configuration, eval_expr
from chorcheck.syntax import parse_formula, print_formula

words = st.text(alphabet="01", min_size=1, max_size=3)
instances = st.lists(st.tuples(words, words), min_size=1, max_size=3).map(lambda ps: PcpInstance(tuple(ps)))


def test_instance_validation():
    assert PcpInstance.parse("0:0,1:101").pairs == (("0", "0"), ("1", "101"))
    with pytest.raises(ValueError):
        PcpInstance.parse("0:2")
    with pytest.raises(ValueError):
        PcpInstance.parse("01")
    with pytest.raises(ValueError):
        PcpInstance(())


def test_encoding_shape():
    cfg = encode_pcp(PcpInstance.parse("0:0"))
    assert not is_recursion_free(cfg.chor)
    assert len(cfg.state) == 5 and cfg.state.lookup("r", "B") == 1
    names = {n.ident for n in free_names(cfg.chor)}
    assert {"A", "B", "a", "b", "str1", "str2", "tmp1", "tmp2", "r"} <= names
    assert Name("A1", Sort.PARTICIPANT) in free_names(cfg.chor)


def test_formula_is_core_and_round_trips():
    f = pcp_formula()
    assert parse_formula(print_formula(f)) == f
    assert F.is_core(expand_derived(f))
    done = Configuration(State.of({("str1", "A"): "0", ("str2", "A"): "0"}), INACTION)
    assert entails(done, solution_condition()).holds


def test_depth_zero_finds_nothing():
    assert not bounded_search(PcpInstance.parse("0:0"), 0).solved


def test_trivial_instance_solved():
    r = bounded_search(PcpInstance.parse("0:0"), 10)
    assert r.solved and len(r.trace) == 5
    assert r.indices() == [1]
    assert r.final.state.lookup("str1", "A") == "0"


def test_unsolvable_instance():
    assert not bounded_search(PcpInstance.parse("0:1"), 30).solved


def test_second_pair_needs_a_switch():
    r = bounded_search(PcpInstance.parse("0:1,1:1"), 20)
    assert r.solved and r.indices() == [2]


def _check_solution(inst, r):
    end = replay(inst, r.trace)
    assert end is not None and end == r.final
    s = end.state
    assert eval_expr(s, solution_condition().left.left.left) == eval_expr(s, solution_condition().left.left.right)
    assert s.lookup("str1", "A") == s.lookup("str2", "A") != ""
    assert is_genuine(inst, index_sequence(encode_pcp(inst), r.trace))


@settings(max_examples=25)
@given(instances)
def test_solutions_replay(inst):
    r = bounded_search(inst, 8)
    if r.solved:
        _check_solution(inst, r)


@settings(max_examples=15)
@given(instances, st.integers(0, 8))
def test_monotone_in_depth(inst, d):
    if bounded_search(inst, d).solved:
        deeper = bounded_search(inst, d + 3)
        assert deeper.solved and len(deeper.trace) <= d


def test_search_is_deterministic():
    inst = PcpInstance.parse("0:0,00:00")
    a, b = bounded_search(inst, 10), bounded_search(inst, 10)
    assert [t.label for t in a.trace] == [t.label for t in b.trace]
