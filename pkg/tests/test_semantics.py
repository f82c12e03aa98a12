import random

import pytest
from hypothesis import given, strategies as st

from chorcheck.core import (
    INACTION,
    At,
    BinOp,
    BranchL,
    Choice,
    Com,
    ComL,
    Cond,
    Init,
    InitL,
    Lit,
    Par,
    State,
    Var,
    free_session_channels,
    located,
)
from chorcheck.errors import RecursionNotSupported, RecursionWithoutBudget, TypeMismatch, UnboundVariable
from chorcheck.generators import random_choreography, random_state, shuffle_monoid
from chorcheck.pcp import PcpInstance, encode_pcp
from chorcheck.semantics import (
    Configuration,
    eval_expr,
    explore,
    guard_diagnostics,
    guard_value,
    next_configs,
    norm,
    product,
    reachable,
    step,
    struct_equiv,
)

seeds = st.integers(0, 2**32 - 1)


def labels(cfg):
    return {t.label for t in step(cfg)}


def random_config(seed):
    rng = random.Random(seed)
    return Configuration(random_state(rng), random_choreography(rng))


def test_eval_examples():
    assert eval_expr(State.of({("x", "A"): 3}), At(BinOp("+", Var("x"), Lit(1)), "A")) == 4
    assert eval_expr(State.of({("tmp1", "B"): "0"}), At(BinOp(".", Var("tmp1"), Lit("01")), "B")) == "001"
    with pytest.raises(UnboundVariable):
        eval_expr(State(), located("y", "B"))
    with pytest.raises(TypeMismatch):
        eval_expr(State(), BinOp("+", Lit(1), Lit("a")))
    # equality never confuses 1 with true
    assert eval_expr(State(), BinOp("=", Lit(1), Lit(True))) is False


def test_ob_first_step_is_init(ob):
    ts = step(ob)
    assert len(ts) == 1
    label = ts[0].label
    assert isinstance(label, InitL) and (label.sender, label.receiver, label.service) == ("Cust", "AC", "ob")
    assert label.channel not in free_session_channels(ob.chor)
    assert label.channel in free_session_channels(ts[0].target.chor)


def test_conditional_takes_one_branch():
    then = Com("A", "B", "k", Lit(1), "y", INACTION)
    orelse = Com("A", "C", "k", Lit(2), "y", INACTION)
    c = Cond(located("e", "A"), then, orelse)
    assert labels(Configuration(State.of({("e", "A"): True}), c)) == {ComL("A", "B", "k")}
    assert labels(Configuration(State.of({("e", "A"): False}), c)) == {ComL("A", "C", "k")}
    stuck = Configuration(State.of({("e", "A"): 3}), c)
    assert step(stuck) == []
    assert guard_diagnostics(stuck)


def test_com_updates_receiver_store():
    cfg = Configuration(State.of({("x", "A"): 5}), Com("A", "B", "k", Var("x"), "y", INACTION))
    (t,) = step(cfg)
    assert t.label == ComL("A", "B", "k")
    assert t.target.state.lookup("y", "B") == 5


def test_com_with_unbound_variable_is_disabled():
    assert step(Configuration(State(), Com("A", "B", "k", Var("x"), "y", INACTION))) == []


def test_next_examples(ob):
    assert len(next_configs(ob, InitL("Cust", "AC", "ob", "k"))) == 1
    (_, binding), = next_configs(ob, InitL("Cust", "AC", "ob", "k"))
    assert list(binding) == ["k"]
    assert next_configs(ob, ComL("Cust", "AC", "k")) == []
    choice = Choice("A", "B", "k", (("l1", Com("A", "B", "k", Lit(1), "x", INACTION)), ("l2", INACTION)))
    ((target, _),) = next_configs(Configuration(State(), choice), BranchL("A", "B", "k", "l2"))
    assert target.chor == INACTION


def test_reachable_examples(ob):
    assert reachable(Configuration(State(), INACTION)) == [Configuration(State(), INACTION)]
    assert len(reachable(ob)) == 8
    pcp = encode_pcp(PcpInstance.parse("0:0"))
    assert reachable(pcp, budget=0) == [pcp]
    with pytest.raises(RecursionWithoutBudget):
        reachable(pcp)


def test_explore_reports_truncation():
    pcp = encode_pcp(PcpInstance.parse("0:0"))
    assert not explore(pcp, budget=3).complete


def test_norm_examples():
    P = Com("A", "B", "k", Lit(1), "x", INACTION)
    Q = Com("B", "C", "k", Lit(1), "x", INACTION)
    R = Com("C", "D", "k", Lit(1), "x", INACTION)
    assert norm(INACTION) == []
    assert norm(Par(INACTION, P)) == [P]
    assert norm(Par(P, Par(Q, R))) == [P, Q, R]
    assert product([]) == INACTION
    with pytest.raises(RecursionNotSupported):
        norm(encode_pcp(PcpInstance.parse("0:0")).chor)


def test_struct_equiv_examples():
    P = Init("A", "B", "a", "k", INACTION)
    Q = Com("A", "B", "k", Lit(1), "x", INACTION)
    assert struct_equiv(Par(INACTION, Q), Q)
    assert struct_equiv(Par(P, Q), Par(Q, P))
    assert struct_equiv(Init("A", "B", "a", "k", INACTION), Init("A", "B", "a", "h", INACTION))
    assert not struct_equiv(P, Q)


@given(seeds)
def test_norm_product_is_equivalent(seed):
    cfg = random_config(seed)
    prod = Configuration(cfg.state, product(norm(cfg.chor)))
    assert struct_equiv(prod.chor, cfg.chor)
    assert labels(prod) == labels(cfg)
    # targets agree too, up to congruence
    assert {(t.label, t.target.key()) for t in step(prod)} == {(t.label, t.target.key()) for t in step(cfg)}


@given(seeds, seeds)
def test_par_frame(seed1, seed2):
    c1 = random_config(seed1)
    c2 = random_choreography(random.Random(seed2))
    if not free_session_channels(c2) <= free_session_channels(c1.chor):
        return
    combined = {(t.label, t.target.key()) for t in step(Configuration(c1.state, Par(c1.chor, c2)))}
    for t in step(c1):
        assert (t.label, Configuration(t.target.state, Par(t.target.chor, c2)).key()) in combined


@given(seeds, seeds)
def test_no_cross_par_interaction(seed1, seed2):
    cfg = random_config(seed1)
    c2 = random_choreography(random.Random(seed2))
    par = Configuration(cfg.state, Par(cfg.chor, c2))
    left = {t.label for t in step(cfg)}
    right = {t.label for t in step(Configuration(cfg.state, c2))}
    for t in step(par):
        assert t.label in left | right or isinstance(t.label, InitL)


@given(seeds)
def test_conditionals_are_deterministic(seed):
    rng = random.Random(seed)
    s = random_state(rng)
    then, orelse = random_choreography(rng), random_choreography(rng)
    guard = At(BinOp("<", Var("x"), Lit(1)), "A")
    got = labels(Configuration(s, Cond(guard, then, orelse)))
    expected = {True: then, False: orelse}.get(guard_value(s, guard))
    assert got == (labels(Configuration(s, expected)) if expected is not None else set())


@given(seeds)
def test_step_is_pure(seed):
    cfg = random_config(seed)
    assert step(cfg) == step(cfg)
    assert [c.key() for c in reachable(cfg)] == [c.key() for c in reachable(cfg)]


@given(seeds)
def test_reachable_is_closed_and_finite(seed):
    cfg = random_config(seed)
    seen = {c.key() for c in reachable(cfg)}
    for c in reachable(cfg):
        for t in step(c):
            assert t.target.key() in seen


@given(seeds, st.randoms(use_true_random=False))
def test_monoid_shuffle_is_struct_equiv(seed, rnd):
    cfg = random_config(seed)
    assert struct_equiv(cfg.chor, shuffle_monoid(cfg.chor, rnd))
