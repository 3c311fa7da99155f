"""Transition derivation: silent steps, outputs, input capabilities.

The golden traces here were derived by hand from the inference rules, rule
by rule, before the engine existed; each test name says which behaviour it
pins.  Alpha-sensitive expectations compare canonical forms, never raw
names, so the engine is free to pick any fresh names it likes.
"""

import pytest

from psiwb.agents import (
    NIL, AssertionAgent, Case, Input, Output, Parallel, Replication,
    Restriction, well_formed,
)
from psiwb.canon import canonical_form
from psiwb.instance import InstanceDefinition, Substitution
from psiwb.instances import builtin_instance
from psiwb.names import Name, Sort, alpha_canonical, alpha_equal, supp, sw
from psiwb.parser import parse_agent, parse_term
from psiwb.semantics import (
    TAU, InputAction, OutputAction, SemanticsConfig, TauAction, Transition,
    action_json, bound_names, commitments, input_transition, reorder_opened,
    tau_closure, transition_json, transitions,
)
from psiwb.terms import Func, IntLit, TupleTerm


# -- helpers ------------------------------------------------------------------


def canon(x) -> str:
    return repr(alpha_canonical(x))


def canon_set(items) -> frozenset:
    return frozenset(canon(i) for i in items)


def the(seq):
    assert len(seq) == 1, f"expected exactly one, got {list(seq)!r}"
    return seq[0]


@pytest.fixture
def ppi():
    return builtin_instance("ppi")


@pytest.fixture
def linda():
    return builtin_instance("linda")


@pytest.fixture
def peano():
    return builtin_instance("peano")


@pytest.fixture
def symspi():
    return builtin_instance("symspi")


@pytest.fixture
def pmspi():
    return builtin_instance("pmspi")


@pytest.fixture
def ndlam():
    return builtin_instance("ndlam")


@pytest.fixture
def vpccs():
    return builtin_instance("vpccs")


def chans(inst, *bases):
    chan = inst.sort_by_id("chan")
    return {b: Name(b, 0, chan) for b in bases}


def tup(*names) -> TupleTerm:
    return TupleTerm(tuple(names))


def num(n: int) -> Func:
    t = Func("zero")
    for _ in range(n):
        t = Func("succ", (t,))
    return t


# -- basics ---------------------------------------------------------------------


def test_nil_has_no_transitions(ppi):
    assert transitions(ppi, ppi.unit_assertion, NIL) == ()
    com = commitments(ppi, ppi.unit_assertion, NIL)
    assert com.taus == () and com.outputs == () and com.inputs == ()


def test_output_prefix_commits_one_output(ppi):
    decls = chans(ppi, "a", "b")
    agent = parse_agent("'a<<b>>", ppi, decls)
    com = commitments(ppi, ppi.unit_assertion, agent)
    t = the(com.outputs)
    assert t.action == OutputAction(decls["a"], (), tup(decls["b"]))
    assert t.derivative == NIL
    assert t.source == agent and t.env == ppi.unit_assertion
    assert com.taus == () and com.inputs == ()


def test_input_prefix_yields_a_capability(ppi):
    decls = chans(ppi, "a")
    agent = parse_agent("a(\\x)<x>.'x<<x>>", ppi, decls)
    com = commitments(ppi, ppi.unit_assertion, agent)
    cap = the(com.inputs)
    assert cap.subject == decls["a"]
    assert len(cap.binders) == 1
    assert com.taus == () and com.outputs == ()


def test_capability_instantiation_substitutes_continuation(ppi):
    decls = chans(ppi, "a", "b")
    agent = parse_agent("a(\\x)<x>.'x<<x>>", ppi, decls)
    cap = the(commitments(ppi, ppi.unit_assertion, agent).inputs)
    b = decls["b"]
    t = the(input_transition(cap, tup(b)))
    assert t.action == InputAction(decls["a"], tup(b))
    assert t.derivative == Output(b, tup(b), NIL)


def test_capability_with_no_match_gives_no_transition(ppi):
    decls = chans(ppi, "a", "b", "c")
    agent = parse_agent("a(\\x)<x>.0", ppi, decls)
    cap = the(commitments(ppi, ppi.unit_assertion, agent).inputs)
    assert input_transition(cap, tup(decls["b"], decls["c"])) == ()


def test_commitments_reject_ill_formed_agents(vpccs):
    decls = {n: Name(n, 0, vpccs.sort_by_id("chan")) for n in ("a", "c")}
    bad = parse_agent("'a<c>", vpccs, decls)  # channels are not sendable data
    assert not well_formed(vpccs, bad).ok
    with pytest.raises(ValueError):
        commitments(vpccs, vpccs.unit_assertion, bad)


def test_config_rejects_zero_unfolding():
    with pytest.raises(ValueError):
        SemanticsConfig(replication_unfold=0)


# -- communication ----------------------------------------------------------------


def test_polyadic_handshake_single_tau(ppi):
    decls = chans(ppi, "a", "b")
    agent = parse_agent("'a<<b>> | a(\\x)<x>.'x<<x>>", ppi, decls)
    com = commitments(ppi, ppi.unit_assertion, agent)
    t = the(com.taus)
    assert t.action == TAU
    b = decls["b"]
    assert t.derivative == Parallel(NIL, Output(b, tup(b), NIL))
    # the unpaired halves stay visible as commitments of their own
    assert len(com.outputs) == 1 and len(com.inputs) == 1


def test_mirrored_orientation_also_communicates(ppi):
    decls = chans(ppi, "a", "b")
    agent = parse_agent("a(\\x)<x>.'x<<x>> | 'a<<b>>", ppi, decls)
    t = the(commitments(ppi, ppi.unit_assertion, agent).taus)
    b = decls["b"]
    assert t.derivative == Parallel(Output(b, tup(b), NIL), NIL)


def test_tuple_match_requires_equal_repeats(linda):
    decls = chans(linda, "a", "c", "d", "z")
    hit = parse_agent("a(\\x)<x, x, z>.'z<<x>> | 'a<<c, c, z>>.'d<<d>>", linda, decls)
    t = the(commitments(linda, linda.unit_assertion, hit).taus)
    c, d, z = decls["c"], decls["d"], decls["z"]
    assert t.derivative == Parallel(Output(z, tup(c), NIL), Output(d, tup(d), NIL))

    miss = parse_agent("a(\\x)<x, x, z>.'z<<x>> | 'a<<c, d, z>>.'d<<d>>", linda, decls)
    assert commitments(linda, linda.unit_assertion, miss).taus == ()


def test_tuple_match_holds_free_positions_literally(linda):
    decls = chans(linda, "a", "c", "z")
    agent = parse_agent("a(\\x)<x, z>.0 | 'a<<c, c>>.0", linda, decls)
    assert commitments(linda, linda.unit_assertion, agent).taus == ()


def test_case_guards_select_entailed_branches(ppi):
    decls = chans(ppi, "a", "b", "c", "d")
    agent = parse_agent("case a = a : 'b<<c>> [] a = b : 'd<<c>>", ppi, decls)
    t = the(commitments(ppi, ppi.unit_assertion, agent).outputs)
    assert t.action.subject == decls["b"]


def test_assertion_agent_commits_nothing(ppi):
    com = commitments(ppi, ppi.unit_assertion, AssertionAgent(ppi.unit_assertion))
    assert com.taus == () and com.outputs == () and com.inputs == ()


# -- restriction: scope, open, extrusion -------------------------------------------


def test_restricted_subject_is_silenced(ppi):
    decls = chans(ppi, "b")
    agent = parse_agent("(new a)'a<<b>>", ppi, decls)
    com = commitments(ppi, ppi.unit_assertion, agent)
    assert com.taus == () and com.outputs == () and com.inputs == ()


def test_restriction_opens_into_the_object(ppi):
    decls = chans(ppi, "a")
    agent = parse_agent("(new b)'a<<b>>", ppi, decls)
    t = the(commitments(ppi, ppi.unit_assertion, agent).outputs)
    assert t.action.subject == decls["a"]
    opened = the(t.action.opened)
    assert t.action.obj == tup(opened)
    assert t.derivative == NIL
    # freshness: an opened name sits in the object, away from env and subject
    assert opened in supp(t.action.obj)
    assert opened not in supp(t.env) | supp(t.action.subject)
    assert opened not in supp(t.source)


def test_unused_restriction_scopes_while_used_one_opens(ppi):
    decls = chans(ppi, "a")
    agent = parse_agent("(new b)(new c)'a<<b>>", ppi, decls)
    t = the(commitments(ppi, ppi.unit_assertion, agent).outputs)
    b = the(t.action.opened)
    assert t.action.obj == tup(b)
    assert isinstance(t.derivative, Restriction) and t.derivative.body == NIL
    assert t.derivative.name != b


def test_opened_names_ordered_inner_first(ppi):
    decls = chans(ppi, "a")
    agent = parse_agent("(new b)(new c)'a<<b, c>>", ppi, decls)
    t = the(commitments(ppi, ppi.unit_assertion, agent).outputs)
    first, second = t.action.opened
    assert t.action.obj == tup(second, first)


def test_reorder_opened_permutes_the_binder_list(ppi):
    decls = chans(ppi, "a")
    agent = parse_agent("(new b)(new c)'a<<b, c>>", ppi, decls)
    t = the(commitments(ppi, ppi.unit_assertion, agent).outputs)
    swapped = reorder_opened(t, (1, 0))
    assert swapped.action.opened == (t.action.opened[1], t.action.opened[0])
    assert swapped.action.obj == t.action.obj
    assert alpha_equal(swapped, reorder_opened(swapped, (0, 1)))
    with pytest.raises(ValueError):
        reorder_opened(t, (0, 0))
    with pytest.raises(ValueError):
        reorder_opened(t, (0,))


def test_scope_extrusion_reaches_the_receiver(ppi):
    decls = chans(ppi, "a")
    agent = parse_agent("(new b)'a<<b>> | a(\\x)<x>.'x<<x>>", ppi, decls)
    t = the(commitments(ppi, ppi.unit_assertion, agent).taus)
    d = t.derivative
    assert isinstance(d, Restriction)
    fresh = d.name
    assert d.body == Parallel(NIL, Output(fresh, tup(fresh), NIL))
    assert fresh not in supp(t.source)


def test_received_name_dodges_the_receivers_own_restriction(ppi):
    decls = chans(ppi, "a", "b", "c")
    b = decls["b"]
    agent = parse_agent("(new b)(a(\\x)<x>.'c<<x, b>>) | 'a<<b>>", ppi, decls)
    t = the(commitments(ppi, ppi.unit_assertion, agent).taus)
    recv = t.derivative.left
    assert isinstance(recv, Restriction)
    assert recv.name != b
    assert recv.body == Output(decls["c"], tup(b, recv.name), NIL)
    assert well_formed(ppi, t.derivative).ok


def test_capability_rescopes_when_received_term_clashes(ppi):
    decls = chans(ppi, "a", "c")
    chan = ppi.sort_by_id("chan")
    agent = parse_agent("(new b)(a(\\x)<x>.'c<<x, b>>)", ppi, decls)
    cap = the(commitments(ppi, ppi.unit_assertion, agent).inputs)
    b = Name("b", 0, chan)
    assert cap.scoped == frozenset({b})
    t = the(input_transition(cap, tup(b)))
    assert isinstance(t.derivative, Restriction)
    assert t.derivative.name != b
    assert t.derivative.body == Output(decls["c"], tup(b, t.derivative.name), NIL)


# -- parallel bystanders and replication --------------------------------------------


def test_parallel_interleaves_and_keeps_bystanders(ppi):
    decls = chans(ppi, "a", "b", "c", "d")
    agent = parse_agent("'a<<b>> | 'c<<d>>", ppi, decls)
    com = commitments(ppi, ppi.unit_assertion, agent)
    assert com.taus == ()
    assert canon_set(com.outputs) == canon_set([
        Transition(ppi.unit_assertion, agent,
                   OutputAction(decls["a"], (), tup(decls["b"])),
                   Parallel(NIL, agent.right)),
        Transition(ppi.unit_assertion, agent,
                   OutputAction(decls["c"], (), tup(decls["d"])),
                   Parallel(agent.left, NIL)),
    ])


def test_replication_unfolds_beside_itself(ppi):
    decls = chans(ppi, "a", "b")
    agent = parse_agent("!'a<<b>>", ppi, decls)
    t = the(commitments(ppi, ppi.unit_assertion, agent,
                        SemanticsConfig(replication_unfold=1)).outputs)
    assert t.derivative == Parallel(NIL, agent)
    # a larger budget adds the double-unfold variant as well
    deep = commitments(ppi, ppi.unit_assertion, agent).outputs
    assert canon(t) in canon_set(deep) and len(deep) == 2


def test_unfold_budget_caps_nested_replication(ppi):
    decls = chans(ppi, "a", "b")
    agent = parse_agent("!!'a<<b>> | a(\\x)<x>.0", ppi, decls)
    deep = commitments(ppi, ppi.unit_assertion, agent,
                       SemanticsConfig(replication_unfold=2))
    assert len(deep.taus) == 1 and len(deep.outputs) == 1
    shallow = commitments(ppi, ppi.unit_assertion, agent,
                          SemanticsConfig(replication_unfold=1))
    assert shallow.taus == () and shallow.outputs == ()


def test_two_copies_of_one_replication_communicate(ppi):
    decls = chans(ppi, "a", "b")
    agent = parse_agent("!('a<<b>> | a(\\x)<x>.0)", ppi, decls)
    com = commitments(ppi, ppi.unit_assertion, agent)
    assert com.taus != ()
    for t in com.taus:
        assert well_formed(ppi, t.derivative).ok


# -- worked exchanges, one per instance family ---------------------------------------


def test_arithmetic_exchange_destructs_a_numeral(peano):
    chan = peano.sort_by_id("chan")
    decls = {n: Name(n, 0, chan) for n in ("a", "c")}
    agent = parse_agent("(new a)('a<2> | a(\\y)succ(y).'c<plus(3, y)>)", peano, decls)
    t = the(transitions(peano, peano.unit_assertion, agent))
    assert t.action == TAU
    after = the(transitions(peano, peano.unit_assertion, t.derivative))
    assert isinstance(after.action, OutputAction)
    assert after.action.subject == decls["c"]
    assert after.action.obj == num(4)


def test_nested_ciphertext_peels_one_layer(symspi):
    key = symspi.sort_by_id("key")
    msg = symspi.sort_by_id("message")
    decls = {"a": Name("a", 0, msg), "c": Name("c", 0, msg),
             "m": Name("m", 0, msg), "l": Name("l", 0, key)}
    receiver = parse_agent("a(\\y)enc(y, k).'c<dec(y, l)>", symspi,
                           dict(decls, k=Name("k", 0, key)))
    cap = the(commitments(symspi, symspi.unit_assertion, receiver).inputs)
    obj = parse_term("enc(enc(m, l), k)", symspi,
                     dict(decls, k=Name("k", 0, key)))
    leaf = the(input_transition(cap, obj))
    assert leaf.derivative == Output(decls["c"], decls["m"], NIL)

    whole = parse_agent(
        "(new a:message, k:key)('a<enc(enc(m, l), k)> | a(\\y)enc(y, k).'c<dec(y, l)>)",
        symspi, decls)
    t = the(transitions(symspi, symspi.unit_assertion, whole))
    assert t.action == TAU
    after = the(transitions(symspi, symspi.unit_assertion, t.derivative))
    assert after.action.subject == decls["c"]
    assert after.action.obj == decls["m"]


def test_key_exchange_then_message_exchange(pmspi):
    impl = pmspi.sort_by_id("impl")
    decls = {"c": Name("c", 0, impl), "m": Name("m", 0, impl)}
    agent = parse_agent(
        "(new a, k, l)('a<enc(dKey(l), eKey(k))>.'a<enc(m, eKey(l))> | "
        "a(\\y)enc(y, eKey(k)).a(\\z)encinv(z, y).'c<z>)",
        pmspi, decls)
    one = the(transitions(pmspi, pmspi.unit_assertion, agent))
    assert one.action == TAU
    two = the(transitions(pmspi, pmspi.unit_assertion, one.derivative))
    assert two.action == TAU
    final = the(transitions(pmspi, pmspi.unit_assertion, two.derivative))
    assert final.action.subject == decls["c"]
    assert final.action.obj == decls["m"]

    closure = tau_closure(pmspi, pmspi.unit_assertion, agent)
    assert not closure.truncated
    assert len(closure.states) == 3
    assert two.derivative in closure


def test_choice_message_forks_the_derivation(ndlam):
    s = ndlam.sort_by_id("s")
    decls = {n: Name(n, 0, s) for n in ("c",)}
    agent = parse_agent(
        r"(new a)(a(\y)y.'c<y> | 'a<(\x. x x) [] (\x. x)>)", ndlam, decls)
    taus = transitions(ndlam, ndlam.unit_assertion, agent)
    assert len(taus) == 2 and all(t.action == TAU for t in taus)
    sent = set()
    for t in taus:
        out = the(transitions(ndlam, ndlam.unit_assertion, t.derivative))
        assert out.action.subject == decls["c"]
        sent.add(canon(out.action.obj))
    assert sent == {canon(parse_term(r"\x. x x", ndlam, {})),
                    canon(parse_term(r"\x. x", ndlam, {}))}


def test_value_reception_evaluates_the_guard(vpccs):
    chan = vpccs.sort_by_id("chan")
    decls = {n: Name(n, 0, chan) for n in ("a", "c")}
    agent = parse_agent("a(\\x)x.case x > 3 : 'c<x + 3>", vpccs, decls)
    cap = the(commitments(vpccs, vpccs.unit_assertion, agent).inputs)

    t = the(input_transition(cap, IntLit(4)))
    out = the(transitions(vpccs, vpccs.unit_assertion, t.derivative))
    assert out.action.subject == decls["c"]
    assert out.action.obj == IntLit(7)

    small = the(input_transition(cap, IntLit(2)))
    assert transitions(vpccs, vpccs.unit_assertion, small.derivative) == ()

    # open expressions are not values: nothing to receive
    x = Name("x", 0, vpccs.sort_by_id("exp"))
    assert input_transition(cap, x) == ()


# -- free inputs over configured message pools ---------------------------------------


def test_transitions_enumerate_configured_messages(ppi):
    decls = chans(ppi, "a", "b", "c")
    b, c = decls["b"], decls["c"]
    tupsort = ppi.sort_by_id("tup")
    cfg = SemanticsConfig(messages={tupsort: (tup(b), tup(c), tup(b, c))})
    agent = parse_agent("a(\\x)<x>.'x<<x>>", ppi, decls)
    ts = transitions(ppi, ppi.unit_assertion, agent, cfg)
    # the 2-tuple cannot match the unary pattern
    assert canon_set(t.action for t in ts) == canon_set([
        InputAction(decls["a"], tup(b)), InputAction(decls["a"], tup(c))])
    by_obj = {t.action.obj: t.derivative for t in ts}
    assert by_obj[tup(b)] == Output(b, tup(b), NIL)
    assert by_obj[tup(c)] == Output(c, tup(c), NIL)


def test_without_a_pool_inputs_stay_capabilities(ppi):
    decls = chans(ppi, "a")
    agent = parse_agent("a(\\x)<x>.0", ppi, decls)
    assert transitions(ppi, ppi.unit_assertion, agent) == ()
    assert len(commitments(ppi, ppi.unit_assertion, agent).inputs) == 1


# -- silent reachability ---------------------------------------------------------------


def test_tau_closure_of_a_quiet_agent_is_itself(ppi):
    decls = chans(ppi, "a", "b")
    agent = parse_agent("'a<<b>>", ppi, decls)
    closure = tau_closure(ppi, ppi.unit_assertion, agent)
    assert not closure.truncated
    assert closure.states == (agent,)
    assert agent in closure and NIL not in closure


def test_tau_closure_reports_truncation(ppi):
    decls = chans(ppi, "b")
    agent = parse_agent("!((new d)('d<<b>> | d(\\x)<x>.0))", ppi, decls)
    closure = tau_closure(ppi, ppi.unit_assertion, agent,
                          SemanticsConfig(state_budget=5))
    assert closure.truncated
    assert len(closure.states) <= 5


def test_tau_closure_terminates_by_visited_set_on_a_tau_loop(ppi):
    # at one unfolding per derivation, the com inside the fresh copy loops
    # straight back to the replication, so the visited set closes the search
    decls = chans(ppi, "b")
    agent = parse_agent("!((new d)('d<<b>> | d(\\x)<x>.0))", ppi, decls)
    cfg = SemanticsConfig(replication_unfold=1)
    closure = tau_closure(ppi, ppi.unit_assertion, agent, cfg)
    assert not closure.truncated
    assert closure.states == (canonical_form(agent),)
    assert agent in closure
    loop = [t for t in transitions(ppi, ppi.unit_assertion, closure.states[0], cfg)
            if t.action == TAU]
    assert loop and all(t.derivative in closure for t in loop)


def test_tau_closure_states_are_collapsed_under_structural_laws(ppi):
    # scope debris like (new d)(0|0) from a spent copy never shows up as
    # a distinct state
    decls = chans(ppi, "a", "b")
    agent = parse_agent("(new d)('d<<b>> | d(\\x)<x>.'a<<x>>)", ppi, decls)
    closure = tau_closure(ppi, ppi.unit_assertion, agent)
    assert not closure.truncated
    assert set(closure.states) == {
        canonical_form(agent),
        parse_agent("'a<<b>>", ppi, decls),
    }


# -- assertion environments through frames ----------------------------------------------


FACT = Sort("n")


def _fact_subst_term(t, sub):
    return sub.get(t, t) if isinstance(t, Name) else t


def _fact_subst_cond(c, sub):
    return tuple(_fact_subst_term(i, sub) for i in c)


def _fact_entails(psi, cond) -> bool:
    if cond == ("top",):
        return True
    if cond[0] == "eq" and cond[1] == cond[2]:
        return True
    return cond in psi


def fact_instance() -> InstanceDefinition:
    """Names-as-terms calculus whose assertions are finite sets of facts.

    Conditions are tuples: ("eq", M, K) holds reflexively or by assertion,
    anything else by assertion only.  Composition is union, so a parallel
    sibling's facts genuinely extend what a branch can derive.
    """
    return InstanceDefinition(
        name="facts",
        sorts=(FACT,),
        restrictable=frozenset({FACT}),
        can_receive=frozenset({(FACT, FACT)}),
        can_send=frozenset({(FACT, FACT)}),
        can_subst_by=frozenset({(FACT, FACT)}),
        unit_assertion=frozenset(),
        compose=lambda a, b: a | b,
        entails=_fact_entails,
        channel_eq_condition=lambda m, k: ("eq", m, k),
        sort_of=lambda t: FACT,
        substitute_term=_fact_subst_term,
        match=lambda obj, binders, pattern: ((obj,),),
        pattern_binders=lambda pattern: (frozenset({pattern}),),
        substitute_condition=_fact_subst_cond,
        substitute_assertion=lambda a, sub: frozenset(
            _fact_subst_cond(c, sub) for c in a),
    )


def _fn(base: str) -> Name:
    return Name(base, 0, FACT)


def test_sibling_assertions_enable_guards():
    inst = fact_instance()
    a, b, f = _fn("a"), _fn("b"), _fn("f")
    guarded = Case((((("flag", f)), Output(a, b, NIL)),))
    alone = commitments(inst, inst.unit_assertion, guarded)
    assert alone.outputs == ()
    helped = commitments(
        inst, inst.unit_assertion,
        Parallel(AssertionAgent(frozenset({("flag", f)})), guarded))
    assert len(helped.outputs) == 1


def test_restricted_assertions_do_not_leak_their_names():
    inst = fact_instance()
    a, b, f = _fn("a"), _fn("b"), _fn("f")
    # the assertion speaks about its own bound f, the guard about the free f
    hidden = Restriction(f, AssertionAgent(frozenset({("flag", f)})))
    guarded = Case(((("flag", f), Output(a, b, NIL)),))
    com = commitments(inst, inst.unit_assertion, Parallel(hidden, guarded))
    assert com.outputs == ()


def test_communication_env_composes_both_frames():
    inst = fact_instance()
    a, b, t = _fn("a"), _fn("b"), _fn("t")
    x = _fn("x")
    bridge = AssertionAgent(frozenset({("eq", a, b)}))
    sender = Parallel(bridge, Output(a, t, NIL))
    receiver = Input(b, (x,), x, NIL)
    linked = commitments(inst, inst.unit_assertion, Parallel(sender, receiver))
    assert len(linked.taus) == 1
    plain = commitments(
        inst, inst.unit_assertion, Parallel(Output(a, t, NIL), receiver))
    assert plain.taus == ()


def test_environment_argument_feeds_entailment():
    inst = fact_instance()
    a, b, t = _fn("a"), _fn("b"), _fn("t")
    x = _fn("x")
    agent = Parallel(Output(a, t, NIL), Input(b, (x,), x, NIL))
    assert commitments(inst, inst.unit_assertion, agent).taus == ()
    linked = commitments(inst, frozenset({("eq", a, b)}), agent)
    assert len(linked.taus) == 1


# -- engine invariants -------------------------------------------------------------------


def _golden_agents():
    ppi = builtin_instance("ppi")
    decls = chans(ppi, "a", "b", "c")
    texts = [
        "'a<<b>> | a(\\x)<x>.'x<<x>>",
        "(new b)'a<<b>> | a(\\x)<x>.'x<<x>>",
        "(new b)(a(\\x)<x>.'c<<x, b>>) | 'a<<b>>",
        "!('a<<b>> | a(\\x)<x>.0)",
        "(new b)(new c)'a<<b, c>>",
        "case a = a : (new d)'a<<d, b>>",
    ]
    for text in texts:
        yield ppi, parse_agent(text, ppi, decls)


def test_derivatives_stay_well_formed():
    for inst, agent in _golden_agents():
        for t in transitions(inst, inst.unit_assertion, agent):
            assert well_formed(inst, t.derivative).ok, t


def test_no_transition_invents_names():
    for inst, agent in _golden_agents():
        allowed = supp(agent) | supp(inst.unit_assertion)
        for t in transitions(inst, inst.unit_assertion, agent):
            opened = set(bound_names(t.action))
            assert supp(t.action) - opened <= allowed, t
            assert supp(t.derivative) - opened <= allowed, t


def test_opened_names_are_fresh_and_reach_the_object():
    for inst, agent in _golden_agents():
        for t in transitions(inst, inst.unit_assertion, agent):
            opened = bound_names(t.action)
            assert len(set(opened)) == len(opened)
            for n in opened:
                assert n in supp(t.action.obj), t
                assert n not in supp(t.env) | supp(t.action.subject), t
                assert n not in supp(t.source), t


def test_alpha_variant_sources_give_alpha_equal_transitions():
    for inst, agent in _golden_agents():
        fresh = Name("w", 99, inst.sort_by_id("chan"))
        variant = None
        for t in transitions(inst, inst.unit_assertion, agent):
            opened = bound_names(t.action)
            if opened:
                variant = reorder_opened(t, tuple(reversed(range(len(opened)))))
        renamed = sw(Name("b", 0, inst.sort_by_id("chan")), fresh, agent)
        got = canon_set(
            sw(fresh, Name("b", 0, inst.sort_by_id("chan")), t)
            for t in transitions(inst, inst.unit_assertion, renamed))
        assert got == canon_set(transitions(inst, inst.unit_assertion, agent))
        if variant is not None:
            assert alpha_equal(variant, variant)


def test_transition_support_excludes_opened_names(ppi):
    decls = chans(ppi, "a")
    agent = parse_agent("(new b)'a<<b>>", ppi, decls)
    t = the(commitments(ppi, ppi.unit_assertion, agent).outputs)
    opened = the(t.action.opened)
    assert opened not in supp(t)
    assert supp(t) == supp(agent) | supp(ppi.unit_assertion)


# -- serialization --------------------------------------------------------------------


def test_transition_json_shapes(ppi):
    decls = chans(ppi, "a")
    agent = parse_agent("(new b)'a<<b>>", ppi, decls)
    t = the(commitments(ppi, ppi.unit_assertion, agent).outputs)
    doc = transition_json(t)
    assert set(doc) == {"env", "source", "action", "derivative"}
    act = doc["action"]
    assert act["kind"] == "output"
    assert act["subject"] == repr(decls["a"])
    assert len(act["opened"]) == 1
    assert act["object"] == repr(t.action.obj)

    assert action_json(TAU) == {
        "kind": "tau", "subject": None, "opened": [], "object": None}
    got = action_json(InputAction(decls["a"], tup(decls["a"])))
    assert got["kind"] == "input" and got["opened"] == []
