"""Value-passing CCS: evaluation-on-substitution and the pi variant."""

import pytest

from psiwb.agents import Case, Input, Output, substitute_agent, well_formed
from psiwb.instance import Substitution, match_pattern, usage_preorder_term
from psiwb.instances import builtin_instance, vpccs_eval
from psiwb.instances.vpccs import (CHAN, EXP, VALUE, is_expression, is_value,
                                   vpccs_substitute)
from psiwb.names import Name
from psiwb.parser import parse_agent, parse_term
from psiwb.surface import ElaborationError
from psiwb.terms import BOT, TOP, BinOp, BoolLit, IntLit


def chan(b):
    return Name(b, 0, CHAN)


def var(b):
    return Name(b, 0, EXP)


a, c = chan("a"), chan("c")
x, y = var("x"), var("y")


def plus(l, r):
    return BinOp("+", l, r)


def gt(l, r):
    return BinOp(">", l, r)


# -- evaluation ---------------------------------------------------------------


def test_eval_closed_sum():
    assert vpccs_eval(plus(IntLit(2), IntLit(3))) == IntLit(5)


def test_eval_closed_comparison():
    assert vpccs_eval(gt(IntLit(4), IntLit(3))) == TOP
    assert vpccs_eval(gt(IntLit(3), IntLit(3))) == BOT


def test_eval_leaves_open_expressions_alone():
    e = plus(x, IntLit(3))
    assert vpccs_eval(e) == e


def test_eval_is_not_partial():
    # one open leaf keeps the whole expression symbolic
    e = plus(plus(IntLit(1), IntLit(1)), x)
    assert vpccs_eval(e) == e


def test_eval_nested():
    e = gt(plus(IntLit(2), IntLit(2)), IntLit(3))
    assert vpccs_eval(e) == TOP


def test_values_and_expressions():
    assert is_value(IntLit(7)) and is_value(TOP)
    assert not is_value(plus(IntLit(1), IntLit(1)))
    assert is_expression(x) and not is_expression(a)


# -- substitution evaluates ---------------------------------------------------


def test_substitution_closes_and_evaluates():
    sub = Substitution.of((x, IntLit(4)))
    assert vpccs_substitute(plus(x, IntLit(3)), sub) == IntLit(7)
    assert vpccs_substitute(gt(x, IntLit(3)), sub) == TOP


def test_substitution_leaves_still_open_terms():
    sub = Substitution.of((x, IntLit(4)))
    got = vpccs_substitute(plus(x, y), sub)
    assert got == plus(IntLit(4), y)


def test_substitution_on_names():
    sub = Substitution.of((x, IntLit(1)))
    assert vpccs_substitute(x, sub) == IntLit(1)
    assert vpccs_substitute(a, sub) == a


def test_sorts_follow_evaluation():
    inst = builtin_instance("vpccs")
    assert inst.sort_of(plus(x, IntLit(3))) == EXP
    assert inst.sort_of(IntLit(7)) == VALUE
    assert inst.sort_of(a) == CHAN
    # closing an expression moves it down the substitution preorder
    assert usage_preorder_term(inst, VALUE, EXP)


# -- matching -----------------------------------------------------------------


def test_match_accepts_values_only():
    inst = builtin_instance("vpccs")
    assert inst.match(IntLit(2), (x,), x) == ((IntLit(2),),)
    assert inst.match(plus(IntLit(1), IntLit(1)), (x,), x) == ()
    assert inst.match(a, (x,), x) == ()
    assert inst.match(IntLit(2), (), x) == ()


def test_vppi_match_also_accepts_channels():
    inst = builtin_instance("vppi")
    assert inst.match(a, (x,), x) == ((a,),)
    assert inst.match(IntLit(2), (x,), x) == ((IntLit(2),),)
    assert inst.match(plus(IntLit(1), IntLit(1)), (x,), x) == ()


def test_match_pattern_wrapper():
    inst = builtin_instance("vpccs")
    assert match_pattern(inst, TOP, (x,), x) == ((TOP,),)


# -- the worked reception -----------------------------------------------------


def test_reception_closes_the_case_guard():
    inst = builtin_instance("vpccs")
    agent = parse_agent("a(\\x)x . case x>3 : 'c<x+3>", inst, {"a": a, "c": c})
    assert isinstance(agent, Input)
    assert well_formed(inst, agent).ok
    sols = inst.match(IntLit(4), agent.binders, agent.pattern)
    assert sols == ((IntLit(4),),)
    sub = Substitution.of((agent.binders[0], IntLit(4)))
    cont = substitute_agent(inst, agent.cont, sub)
    assert isinstance(cont, Case)
    ((cond, branch),) = cont.branches
    assert cond == TOP
    assert isinstance(branch, Output)
    assert branch.obj == IntLit(7)
    assert inst.entails(inst.unit_assertion, cond)


def test_unfired_guard_stays_symbolic():
    inst = builtin_instance("vpccs")
    agent = parse_agent("case x>3 : 'c<x+3>", inst, {"c": c, "x": x})
    ((cond, _),) = agent.branches
    assert cond == gt(x, IntLit(3))
    assert not inst.entails(inst.unit_assertion, cond)


# -- sorting discipline -------------------------------------------------------


def test_channels_cannot_be_sent_in_vpccs():
    inst = builtin_instance("vpccs")
    agent = parse_agent("'a<c>", inst, {"a": a, "c": c})
    report = well_formed(inst, agent)
    assert not report.ok
    assert any(v.clause == "output-sorts" for v in report.violations)


def test_channels_can_be_sent_in_vppi():
    inst = builtin_instance("vppi")
    agent = parse_agent("'a<c>", inst, {"a": a, "c": c})
    assert well_formed(inst, agent).ok


def test_expression_restriction_is_rejected():
    inst = builtin_instance("vpccs")
    agent = parse_agent("(new e:exp)'a<e+1>", inst, {"a": a})
    report = well_formed(inst, agent)
    assert any(v.clause == "restriction-sort" for v in report.violations)


def test_channel_restriction_is_fine():
    inst = builtin_instance("vpccs")
    agent = parse_agent("(new b:chan)'b<1>", inst, {})
    assert well_formed(inst, agent).ok


def test_substitution_sort_check():
    inst = builtin_instance("vpccs")
    with pytest.raises(ValueError):
        Substitution.make(inst, [(x, plus(y, IntLit(1)))])  # exp := exp
    with pytest.raises(ValueError):
        Substitution.make(inst, [(a, c)])  # chan := chan only in vppi
    Substitution.make(builtin_instance("vppi"), [(a, c)])
    Substitution.make(inst, [(x, IntLit(3))])


# -- elaboration --------------------------------------------------------------


def test_parse_expression_terms():
    inst = builtin_instance("vpccs")
    assert parse_term("x+3", inst, {"x": x}) == plus(x, IntLit(3))
    assert parse_term("T", inst) == TOP
    assert parse_term("2", inst) == IntLit(2)


def test_condition_must_be_boolean():
    inst = builtin_instance("vpccs")
    with pytest.raises(ElaborationError):
        parse_agent("case x+3 : 0", inst, {"x": x})


def test_vpccs_binders_default_to_exp():
    inst = builtin_instance("vpccs")
    agent = parse_agent("a(\\w)w . 'c<w+1>", inst, {"a": a, "c": c})
    (binder,) = agent.binders
    assert binder.sort == EXP


def test_vppi_binders_require_annotation():
    inst = builtin_instance("vppi")
    with pytest.raises(ElaborationError):
        parse_agent("a(\\w)w . 0", inst, {"a": a})
    agent = parse_agent("a(\\w:chan)w . 'w<1>", inst, {"a": a})
    assert agent.binders[0].sort == CHAN
    assert well_formed(inst, agent).ok


def test_channel_equivalence_is_name_identity():
    inst = builtin_instance("vpccs")
    assert inst.entails(inst.unit_assertion, inst.channel_eq_condition(a, a))
    assert not inst.entails(inst.unit_assertion, inst.channel_eq_condition(a, c))
    assert not inst.entails(inst.unit_assertion,
                            inst.channel_eq_condition(IntLit(1), IntLit(1)))


def test_message_pools():
    inst = builtin_instance("vpccs")
    values = inst.message_generator(VALUE, (a, x))
    assert IntLit(0) in values and TOP in values
    assert all(is_value(v) for v in values)
    chans = inst.message_generator(CHAN, (a, x))
    assert chans == (a,)
