"""Process syntax, file formats, and elaboration against the ppi family."""

import pytest

from psiwb.agents import (
    NIL, Case, Input, Output, Parallel, Replication, Restriction, well_formed,
)
from psiwb.instances import builtin_instance
from psiwb.instances.ppi import CHAN, TUP
from psiwb.names import Name, alpha_equal
from psiwb.parser import (
    ProcessFileError, parse_agent, parse_message_file, parse_process_file,
    parse_term,
)
from psiwb.surface import ElaborationError, ParseError
from psiwb.terms import NameEq, TOP, TupleTerm, UNIT

ppi = builtin_instance("ppi")
decls = {s: Name(s, 0, CHAN) for s in ("a", "b", "c")}
a, b, c = decls["a"], decls["b"], decls["c"]
x, y = Name("x", 0, CHAN), Name("y", 0, CHAN)


def P(text):
    return parse_agent(text, ppi, decls)


def T(*items):
    return TupleTerm(tuple(items))


def test_output_forms():
    assert P("'a<<b,c>>") == Output(a, T(b, c), NIL)
    assert P("'a<<>>") == Output(a, T(), NIL)
    assert P("'a<<b>>.'b<<>>") == Output(a, T(b), Output(b, T(), NIL))


def test_input_binds_pattern_and_continuation():
    got = P(r"a(\x,y)<x,y>.'b<<x>>")
    want = Input(a, (x, y), T(x, y), Output(b, T(x), NIL))
    assert got == want


def test_input_binder_order_differs_from_pattern_order():
    got = P(r"a(\y,x)<x,y>")
    assert got == Input(a, (y, x), T(x, y), NIL)


def test_restriction_defaults_to_unique_restrictable_sort():
    d = Name("d", 0, CHAN)
    assert P("(new d)'a<<d>>") == Restriction(d, Output(a, T(d), NIL))
    assert P("(new d,e)0").name == d


def test_case_branches():
    got = P("case a=b : 'a<<>> [] T : 0")
    assert got == Case(((NameEq(a, b), Output(a, T(), NIL)), (TOP, NIL)))


def test_replication_assertion_nil():
    assert P("!'a<<>>") == Replication(Output(a, T(), NIL))
    assert P("(|1|)").assertion == UNIT
    assert P("0") == NIL and P("0").is_nil()


def test_parallel_grouping():
    got = P("'a<<>> | 'b<<>> | 'c<<>>")
    assert isinstance(got, Parallel)
    flat = []

    def walk(p):
        if isinstance(p, Parallel):
            walk(p.left), walk(p.right)
        else:
            flat.append(p.subject)
    walk(got)
    assert flat == [a, b, c]


def test_comments_and_whitespace():
    got = P("'a<<b>>  -- send pair\n | -- more\n 0")
    assert isinstance(got, Parallel)


def test_repr_round_trips():
    for text in (
        "'a<<b,c>>",
        r"a(\x,y)<x,y>.'b<<x>>",
        "(new d)('a<<d>> | !d(\\x)<x>)",
        "case a=b : 'a<<>> [] T : (|1|)",
    ):
        agent = P(text)
        again = P(repr(agent))
        assert alpha_equal(agent, again)


def test_undeclared_name_is_an_error():
    with pytest.raises(ElaborationError):
        P("'q<<a>>")


def test_reserved_words_rejected_as_binders():
    with pytest.raises(ParseError):
        P("(new case)0")


def test_unknown_sort_annotation_is_a_parse_error():
    with pytest.raises(ParseError):
        P(r"a(\x:foo)<x>")


def test_well_formedness_of_parsed_agents():
    assert well_formed(ppi, P(r"(new d)('a<<d>> | a(\x)<x>.'x<<>>)")).ok
    report = well_formed(ppi, P("'a<b>"))
    assert not report.ok
    assert report.violations[0].clause == "output-sorts"


def test_ill_chosen_binders_flagged_not_parse_rejected():
    agent = P(r"a(\x)<x,b>")
    report = well_formed(ppi, agent)
    assert not report.ok
    assert report.violations[0].clause == "input-binders"


def test_parse_term_and_message_file():
    assert parse_term("<a,b>", ppi, decls) == T(a, b)
    env = dict(decls)
    msgs = parse_message_file("name d : chan\nmsg tup : <a,d>\nmsg tup : <>\n", ppi, env)
    d = Name("d", 0, CHAN)
    assert msgs[TUP] == (T(a, d), T())


def test_process_file_round_trip():
    text = """-- two-step relay
instance: ppi
name a, c : chan

agent:
(new b) ('a<<b>> | a(\\x)<x> . 'x<<c>>)
"""
    inst, agent, env = parse_process_file(text, builtin_instance)
    assert inst.name == "ppi"
    assert set(env) == {"a", "c"}
    assert well_formed(inst, agent).ok
    assert isinstance(agent, Restriction)


def test_process_file_requires_instance_header():
    with pytest.raises(ProcessFileError):
        parse_process_file("name a : chan\n'a<<>>\n", builtin_instance)


def test_process_file_rejects_declarations_after_body():
    bad = "instance: ppi\nname a : chan\n'a<<>>\nname b : chan\n"
    with pytest.raises(ProcessFileError):
        parse_process_file(bad, builtin_instance)
