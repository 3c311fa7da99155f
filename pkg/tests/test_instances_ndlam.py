"""Lambda-with-choice instance: evaluation lives in matching, not substitution."""

import pytest

from psiwb.agents import Input, Output, Parallel, Restriction, well_formed
from psiwb.instance import Substitution, match_pattern
from psiwb.instances import builtin_instance, ndlam_normal_forms
from psiwb.instances.ndlam import LSORT, is_lambda_term, ndlam_substitute
from psiwb.names import Name, alpha_canonical, supp
from psiwb.parser import parse_agent, parse_term
from psiwb.rewrite import FuelExhausted
from psiwb.terms import App, Choice, Lam


def nm(base):
    return Name(base, 0, LSORT)


x, y, z, a, c = map(nm, "xyzac")

IDENT = Lam(x, x)               # \x. x
DUP = Lam(x, App(x, x))         # \x. x x
OMEGA = App(DUP, DUP)           # loops forever, no normal form


def canon_set(terms):
    return {repr(alpha_canonical(t)) for t in terms}


# -- the normal-form collector -----------------------------------------------


def test_normal_forms_of_a_choice_of_lambdas():
    got = ndlam_normal_forms(Choice(DUP, IDENT))
    assert canon_set(got) == canon_set({DUP, IDENT})


def test_normal_form_of_a_value_is_itself():
    assert ndlam_normal_forms(IDENT) == frozenset({IDENT})


def test_beta_step_result():
    # hand oracle: ((\x. x) a) has the single reduct x[a/x] = a, a name,
    # and names are normal
    got = ndlam_normal_forms(App(IDENT, a))
    assert got == frozenset({a})


def test_reduction_tree_of_the_choice_example_by_hand():
    # the term (\x. x x) [] (\x. x) has exactly two one-step reducts, the
    # branches, and each branch is a lambda hence normal; matching must
    # deliver exactly that two-leaf tree
    t = Choice(DUP, IDENT)
    inst = builtin_instance("ndlam")
    sols = inst.match(t, (y,), y)
    assert canon_set(v for (v,) in sols) == canon_set({DUP, IDENT})
    assert len(sols) == 2


def test_omega_has_no_normal_forms():
    assert ndlam_normal_forms(OMEGA) == frozenset()


def test_growing_term_exhausts_fuel():
    grower = Lam(x, App(App(x, x), x))
    with pytest.raises(FuelExhausted):
        ndlam_normal_forms(App(grower, grower), fuel=40)


# -- matching ----------------------------------------------------------------


def test_match_requires_the_pattern_name_as_sole_binder():
    inst = builtin_instance("ndlam")
    assert inst.match(IDENT, (), y) == ()
    assert inst.match(IDENT, (z,), y) == ()
    assert inst.match(IDENT, (y, z), y) == ()


def test_match_evaluates_under_application():
    inst = builtin_instance("ndlam")
    sols = inst.match(App(Choice(IDENT, DUP), a), (y,), y)
    # (ident a) -> a; (dup a) -> a a; both normal
    assert canon_set(v for (v,) in sols) == canon_set({a, App(a, a)})


def test_match_pattern_wrapper_agrees():
    inst = builtin_instance("ndlam")
    sols = match_pattern(inst, App(IDENT, a), (y,), y)
    assert sols == ((a,),)


def test_match_on_partial_term_is_empty():
    inst = builtin_instance("ndlam")
    assert inst.match(OMEGA, (y,), y) == ()


def test_binder_sets_are_exactly_the_pattern_name():
    inst = builtin_instance("ndlam")
    assert inst.pattern_binders(y) == (frozenset({y}),)
    assert inst.pattern_binders(App(x, y)) == ()


# -- substitution ------------------------------------------------------------


def test_substitution_is_simultaneous():
    sub = Substitution.of((x, y), (y, x))
    assert ndlam_substitute(App(x, y), sub) == App(y, x)


def test_substitution_avoids_capture():
    sub = Substitution.of((x, y))
    got = ndlam_substitute(Lam(y, App(x, y)), sub)
    assert isinstance(got, Lam)
    assert got.binder != y
    assert got.body == App(y, got.binder)
    assert supp(got) == {y}


def test_substitution_skips_shadowed_binder():
    sub = Substitution.of((x, a))
    assert ndlam_substitute(Lam(x, App(x, y)), sub) == Lam(x, App(x, y))


def test_substitution_does_not_evaluate():
    sub = Substitution.of((y, IDENT))
    got = ndlam_substitute(App(y, a), sub)
    assert got == App(IDENT, a)  # still a redex


def test_substitute_rejects_foreign_terms():
    from psiwb.terms import UnitTerm
    with pytest.raises(TypeError):
        ndlam_substitute(UnitTerm(), Substitution.of((x, a)))


def test_is_lambda_term_shapes():
    from psiwb.terms import Func
    assert is_lambda_term(Choice(Lam(x, App(x, x)), a))
    assert not is_lambda_term(Func("enc", (a, a)))


# -- the instance end to end --------------------------------------------------


def decls():
    return {"a": a, "c": c, "x": x, "y": y, "z": z}


def test_parse_lambda_choice_term():
    t = parse_term(r"(\x. x x) [] (\x. x)", builtin_instance("ndlam"), decls())
    assert canon_set([t]) == canon_set([Choice(DUP, IDENT)])


def test_parse_application_is_left_associative():
    t = parse_term("x y z", builtin_instance("ndlam"), decls())
    assert t == App(App(x, y), z)


def test_worked_example_parses_and_is_well_formed():
    inst = builtin_instance("ndlam")
    agent = parse_agent(
        r"(new a)( a(\y)y . 'c<y> . 0 | 'a<(\x. x x) [] (\x. x)> . 0 )",
        inst, {"c": c})
    assert well_formed(inst, agent).ok
    assert isinstance(agent, Restriction)
    assert isinstance(agent.body, Parallel)
    assert isinstance(agent.body.left, Input)
    assert isinstance(agent.body.right, Output)
    assert canon_set([agent.body.right.obj]) == canon_set([Choice(DUP, IDENT)])


def test_input_binder_sort_is_inferred():
    inst = builtin_instance("ndlam")
    agent = parse_agent(r"a(\w)w . 'c<w> . 0", inst, {"a": a, "c": c})
    assert isinstance(agent, Input)
    (binder,) = agent.binders
    assert binder.sort == LSORT
    assert agent.pattern == binder


def test_messages_are_normal_forms():
    inst = builtin_instance("ndlam")
    for m in inst.message_generator(LSORT, (a, c)):
        assert ndlam_normal_forms(m) == frozenset({m})


def test_random_terms_round_trip_substitution_support():
    import random
    rng = random.Random(11)
    names = (a, c, x, y, z)
    inst = builtin_instance("ndlam")
    sub = Substitution.of((a, App(c, c)))
    for _ in range(200):
        t = inst.term_generator(rng, names)
        assert is_lambda_term(t)
        got = ndlam_substitute(t, sub)
        expect = (supp(t) - {a}) | ({c} if a in supp(t) else set())
        assert supp(got) == expect
