import random

import pytest
from hypothesis import given, settings, strategies as st

from chorcheck import formulas as F
from chorcheck.checker import check_proof, entails, expand_derived, predicted_channels, quantifier_domain
from chorcheck.core import INACTION, At, Init, Lit, Sort, State, located
from chorcheck.errors import RecursionNotSupported
from chorcheck.generators import GeneratorConfig, random_choreography, random_formula, random_state, shuffle_monoid
from chorcheck.pcp import PcpInstance, encode_pcp
from chorcheck.semantics import Configuration, norm, product
from chorcheck.syntax import parse_formula

from conftest import configuration, load

seeds = st.integers(0, 2**32 - 1)
SUGAR = GeneratorConfig(sugar=True)


def random_case(seed, cfg=None):
    rng = random.Random(seed)
    c = random_choreography(rng, cfg)
    return Configuration(random_state(rng, cfg), c), random_formula(rng, cfg, c)


def test_expand_examples():
    assert expand_derived(F.TrueF()) == F.Eq(At(Lit(0), "A"), At(Lit(0), "A"))
    assert expand_derived(F.Box(F.EndF())) == F.Neg(F.May(F.Neg(F.EndF())))
    nxt = expand_derived(F.NextF(F.EndF()))
    assert F.is_core(nxt)
    shapes = {type(f.label) for f in _walk(nxt) if isinstance(f, F.Action)}
    assert shapes == {F.InitL, F.ComL, F.BranchL}


def _walk(f):
    yield f
    for s in F.subformulas(f):
        yield from _walk(s)


def test_interact_pins_endpoints():
    f = expand_derived(F.Interact("A", "B", F.EndF()))
    actions = [g for g in _walk(f) if isinstance(g, F.Action)]
    assert len(actions) == 3
    assert all((a.label.sender, a.label.receiver) == ("A", "B") for a in actions)


def test_quantifier_domain_examples(ob):
    f = load("ob.gl").formulas["availability"]
    assert set(quantifier_domain(ob, f, Sort.PARTICIPANT)) == {"Cust", "AC", "AC'"}
    empty = Configuration(State(), INACTION)
    for sort in F.QUANTIFIER_SORTS:
        assert quantifier_domain(empty, F.EndF(), sort) == []
    cfg = Configuration(State.of({("r", "B"): 1}), INACTION)
    assert quantifier_domain(cfg, F.Eq(located("r", "B"), At(Lit(2), "B")), Sort.VARIABLE) == [1, 2]


def test_predicted_channels_cover_repeated_inits():
    c = Init("A", "B", "a", "k", Init("A", "B", "a", "k", INACTION))
    assert predicted_channels(c) >= {"k#1", "k#2"}


def test_entails_examples(ob):
    assert entails(Configuration(State(), INACTION), F.EndF()).holds
    assert entails(ob, parse_formula("exists B:participant . <init Cust->B ob(k)> true")).holds


@pytest.mark.parametrize("name", ["availability", "usage", "coupling"])
def test_booking_properties_hold(ob, name):
    assert entails(ob, load("ob.gl").formulas[name]).holds


def test_connectedness_fails_on_booking(ob):
    assert not entails(ob, load("connectedness.gl").formulas["connectedness"]).holds


@pytest.mark.parametrize("chor,expected", [("C1", True), ("C2", True), ("C2_mutated", False)])
def test_response_abstraction(chor, expected):
    f = load("response.gl").formulas["response"]
    assert entails(configuration("response.gc", chor), f).holds is expected


def test_response_needs_the_value_of_x():
    f = load("response.gl").formulas["response"]
    cfg = configuration("response.gc", "C1")
    assert not entails(Configuration(State(), cfg.chor), f).holds


def test_recursion_rejected():
    with pytest.raises(RecursionNotSupported, match="rec X"):
        entails(encode_pcp(PcpInstance.parse("0:0")), F.EndF())


def test_failed_evaluation_makes_equality_false():
    cfg = Configuration(State(), INACTION)
    assert not entails(cfg, F.Eq(located("x", "A"), located("x", "A"))).holds
    assert entails(cfg, F.Neg(F.Eq(located("x", "A"), located("x", "A")))).holds


def test_witness_replays(ob):
    for f in load("ob.gl").formulas.values():
        v = entails(ob, f, witness=True)
        assert v.holds and check_proof(ob, f, v.witness)


def test_tampered_witness_rejected(ob):
    f = load("ob.gl").formulas["availability"]
    proof = entails(ob, f, witness=True).witness
    forged = type(proof)(proof.rule, "Nobody", proof.premises)
    assert not check_proof(ob, f, forged)


@given(seeds)
def test_classicality(seed):
    cfg, f = random_case(seed)
    assert entails(cfg, F.Neg(F.Neg(f))).holds == entails(cfg, f).holds
    assert not entails(cfg, F.And(f, F.Neg(f))).holds


@given(seeds)
def test_may_is_reflexive(seed):
    cfg, f = random_case(seed)
    if entails(cfg, f).holds:
        assert entails(cfg, F.May(f)).holds


@given(seeds, seeds)
def test_par_witness_gives_partition(seed1, seed2):
    cfg, f1 = random_case(seed1)
    f2 = random_formula(random.Random(seed2), None, cfg.chor)
    v = entails(cfg, F.ParF(f1, f2), witness=True)
    if v.holds:
        assert v.witness.rule == "P_par"
        parts = norm(cfg.chor)
        left = [p for i, p in enumerate(parts) if i in v.witness.detail]
        right = [p for i, p in enumerate(parts) if i not in v.witness.detail]
        assert entails(Configuration(cfg.state, product(left)), f1).holds
        assert entails(Configuration(cfg.state, product(right)), f2).holds


@given(seeds, st.randoms(use_true_random=False))
def test_struct_congruence_stability(seed, rnd):
    cfg, f = random_case(seed)
    shuffled = Configuration(cfg.state, shuffle_monoid(cfg.chor, rnd))
    assert entails(cfg, f).holds == entails(shuffled, f).holds


@settings(max_examples=60)
@given(seeds)
def test_witnesses_replay(seed):
    cfg, f = random_case(seed, SUGAR)
    v = entails(cfg, f, witness=True)
    if v.holds:
        assert check_proof(cfg, f, v.witness)


@given(seeds)
def test_expansion_is_core(seed):
    _, f = random_case(seed, SUGAR)
    g = expand_derived(f)
    assert F.is_core(g)
    assert expand_derived(g) == g
