"""Process syntax: agents, well-formedness, substitution and frames.

Agents are immutable trees over instance terms.  The null process is the
empty case.  ``repr`` renders the concrete process syntax accepted by the
parser, with enough parentheses for an exact round-trip:

* output            ``'M<N>.P``      (trailing ``.P`` omitted when P = 0)
* input             ``M(\\x:s,y:t)X.P``
* case              ``case phi1 : P1 [] phi2 : P2``     (0 when no branches)
* restriction       ``(new a:s)P``
* parallel          ``P | Q``
* replication       ``!P``
* assertion         ``(|Psi|)``
"""

from __future__ import annotations

from dataclasses import dataclass

from .instance import InstanceDefinition, Substitution, substitute
from .names import (
    Name, NominalValue, alpha_canonical, canon_binders, fresh_name, supp, sw,
)


class Agent(NominalValue):
    """Base class for process terms."""

    def is_nil(self) -> bool:
        return isinstance(self, Case) and not self.branches


@dataclass(frozen=True)
class Output(Agent):
    subject: object
    obj: object
    cont: Agent

    def __repr__(self) -> str:
        head = f"'{self.subject!r}<{self.obj!r}>"
        return head if self.cont.is_nil() else f"{head}.{_cont_repr(self.cont)}"


@dataclass(frozen=True)
class Input(Agent):
    subject: object
    binders: tuple          # distinct names, bound in pattern and cont
    pattern: object
    cont: Agent

    def support(self):
        free = supp(self.pattern) | supp(self.cont)
        return supp(self.subject) | (free - frozenset(self.binders))

    def _alpha_canon(self, ren, fresh):
        bs, inner = canon_binders(self.binders, (), ren, fresh)
        return Input(
            alpha_canonical(self.subject, ren, fresh), bs,
            alpha_canonical(self.pattern, inner, fresh),
            alpha_canonical(self.cont, inner, fresh))

    def __repr__(self) -> str:
        bs = ",".join(f"{b!r}:{b.sort.id}" for b in self.binders)
        head = f"{_atom_repr(self.subject)}(\\{bs}){self.pattern!r}"
        return head if self.cont.is_nil() else f"{head}.{_cont_repr(self.cont)}"


@dataclass(frozen=True)
class Case(Agent):
    branches: tuple         # (condition, Agent) pairs

    def __repr__(self) -> str:
        if not self.branches:
            return "0"
        return "case " + " [] ".join(
            f"{cond!r} : {_cont_repr(p)}" for cond, p in self.branches)


@dataclass(frozen=True)
class Restriction(Agent):
    name: Name
    body: Agent

    def support(self):
        return supp(self.body) - {self.name}

    def _alpha_canon(self, ren, fresh):
        (b,), inner = canon_binders((self.name,), (), ren, fresh)
        return Restriction(b, alpha_canonical(self.body, inner, fresh))

    def __repr__(self) -> str:
        return f"(new {self.name!r}:{self.name.sort.id}){_cont_repr(self.body)}"


@dataclass(frozen=True)
class Parallel(Agent):
    left: Agent
    right: Agent

    def __repr__(self) -> str:
        return f"{_par_repr(self.left)} | {_par_repr(self.right)}"


@dataclass(frozen=True)
class Replication(Agent):
    body: Agent

    def __repr__(self) -> str:
        return f"!{_cont_repr(self.body)}"


@dataclass(frozen=True)
class AssertionAgent(Agent):
    assertion: object

    def __repr__(self) -> str:
        return f"(|{self.assertion!r}|)"


NIL = Case(())


def _cont_repr(p: Agent) -> str:
    """Render for positions where | and a following case branch would rebind."""
    if isinstance(p, Parallel) or (isinstance(p, Case) and p.branches):
        return f"({p!r})"
    return repr(p)


def _par_repr(p: Agent) -> str:
    if isinstance(p, Case) and p.branches:
        return f"({p!r})"
    return repr(p)


def _atom_repr(term) -> str:
    """Input subjects must re-parse as a single atom."""
    text = repr(term)
    if text and (text[0].isalpha() or text[0] in "(<_"):
        return text
    return f"({text})"


# -- well-formedness --------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    clause: str
    at: str
    detail: str

    def __repr__(self) -> str:
        return f"[{self.clause}] {self.detail} (in {self.at})"


@dataclass(frozen=True)
class WellFormednessReport:
    violations: tuple

    @property
    def ok(self) -> bool:
        return not self.violations

    def __repr__(self) -> str:
        if self.ok:
            return "well-formed"
        return "\n".join(repr(v) for v in self.violations)


def unguarded_assertions(agent: Agent) -> tuple:
    """Assertion subagents not underneath an input or output prefix."""
    if isinstance(agent, AssertionAgent):
        return (agent,)
    if isinstance(agent, Parallel):
        return unguarded_assertions(agent.left) + unguarded_assertions(agent.right)
    if isinstance(agent, Restriction):
        return unguarded_assertions(agent.body)
    if isinstance(agent, Replication):
        return unguarded_assertions(agent.body)
    if isinstance(agent, Case):
        out: tuple = ()
        for _, p in agent.branches:
            out += unguarded_assertions(p)
        return out
    return ()


def well_formed(inst: InstanceDefinition, agent: Agent) -> WellFormednessReport:
    bad: list = []
    _check_wf(inst, agent, bad)
    return WellFormednessReport(tuple(bad))


def _check_wf(inst: InstanceDefinition, agent: Agent, bad: list) -> None:
    at = repr(agent)
    if isinstance(agent, Output):
        ms, ns = inst.sort_of(agent.subject), inst.sort_of(agent.obj)
        if not inst.sendable(ms, ns):
            bad.append(Violation(
                "output-sorts", at,
                f"sort {ms} cannot send sort {ns}"))
        _check_wf(inst, agent.cont, bad)
    elif isinstance(agent, Input):
        if len(set(agent.binders)) != len(agent.binders):
            bad.append(Violation("input-binders", at, "repeated binder"))
        else:
            allowed = {frozenset(v) for v in inst.pattern_binders(agent.pattern)}
            if frozenset(agent.binders) not in allowed:
                bad.append(Violation(
                    "input-binders", at,
                    f"{agent.binders!r} is not an allowed binder set of {agent.pattern!r}"))
        ms, xs = inst.sort_of(agent.subject), inst.sort_of(agent.pattern)
        if not inst.receivable(ms, xs):
            bad.append(Violation(
                "input-sorts", at,
                f"sort {ms} cannot receive pattern sort {xs}"))
        _check_wf(inst, agent.cont, bad)
    elif isinstance(agent, Case):
        for _, p in agent.branches:
            for ua in unguarded_assertions(p):
                bad.append(Violation(
                    "unguarded-assertion-case", at,
                    f"assertion {ua!r} unguarded in a case branch"))
            _check_wf(inst, p, bad)
    elif isinstance(agent, Restriction):
        if agent.name.sort not in inst.restrictable:
            bad.append(Violation(
                "restriction-sort", at,
                f"sort {agent.name.sort} is not restrictable"))
        _check_wf(inst, agent.body, bad)
    elif isinstance(agent, Parallel):
        _check_wf(inst, agent.left, bad)
        _check_wf(inst, agent.right, bad)
    elif isinstance(agent, Replication):
        for ua in unguarded_assertions(agent.body):
            bad.append(Violation(
                "unguarded-assertion-rep", at,
                f"assertion {ua!r} unguarded under replication"))
        _check_wf(inst, agent.body, bad)
    elif isinstance(agent, AssertionAgent):
        pass
    else:
        raise TypeError(f"not an agent: {agent!r}")


# -- substitution -----------------------------------------------------------


def substitute_agent(inst: InstanceDefinition, agent: Agent, sub: Substitution) -> Agent:
    """Capture-avoiding substitution; binders are freshened away from the
    substitution's names before it pushes under them."""
    if sub.is_empty():
        return agent
    sub_names = supp(sub)
    if isinstance(agent, Output):
        return Output(
            inst.substitute_term(agent.subject, sub),
            inst.substitute_term(agent.obj, sub),
            substitute_agent(inst, agent.cont, sub))
    if isinstance(agent, Input):
        binders, pattern, cont = agent.binders, agent.pattern, agent.cont
        for i, b in enumerate(tuple(binders)):
            if b in sub_names:
                avoid = sub_names | supp(agent) | frozenset(binders)
                nb = fresh_name(b.sort, avoid, b.base)
                binders = tuple(nb if j == i else x for j, x in enumerate(binders))
                pattern = sw(b, nb, pattern)
                cont = sw(b, nb, cont)
        return Input(
            inst.substitute_term(agent.subject, sub), binders,
            inst.substitute_pattern(pattern, sub),
            substitute_agent(inst, cont, sub))
    if isinstance(agent, Case):
        return Case(tuple(
            (inst.substitute_condition(cond, sub), substitute_agent(inst, p, sub))
            for cond, p in agent.branches))
    if isinstance(agent, Restriction):
        name, body = agent.name, agent.body
        if name in sub_names:
            nb = fresh_name(name.sort, sub_names | supp(agent) | {name}, name.base)
            name, body = nb, sw(name, nb, body)
        return Restriction(name, substitute_agent(inst, body, sub))
    if isinstance(agent, Parallel):
        return Parallel(substitute_agent(inst, agent.left, sub),
                        substitute_agent(inst, agent.right, sub))
    if isinstance(agent, Replication):
        return Replication(substitute_agent(inst, agent.body, sub))
    if isinstance(agent, AssertionAgent):
        return AssertionAgent(inst.substitute_assertion(agent.assertion, sub))
    raise TypeError(f"not an agent: {agent!r}")


# -- frames -----------------------------------------------------------------


@dataclass(frozen=True)
class Frame(NominalValue):
    """An assertion under name binders: (nu binders) assertion."""

    binders: tuple
    assertion: object

    def support(self):
        return supp(self.assertion) - frozenset(self.binders)

    def _alpha_canon(self, ren, fresh):
        bs, inner = canon_binders(self.binders, (), ren, fresh)
        return Frame(bs, alpha_canonical(self.assertion, inner, fresh))

    def freshened(self, avoid) -> "Frame":
        """Alpha-rename binders away from the names of ``avoid``."""
        from .names import avoid_set
        avoid = avoid_set(avoid)
        binders, assertion = list(self.binders), self.assertion
        for i, b in enumerate(tuple(binders)):
            if b in avoid:
                nb = fresh_name(b.sort, avoid | supp(assertion) | set(binders), b.base)
                binders[i] = nb
                assertion = sw(b, nb, assertion)
        return Frame(tuple(binders), assertion)

    def __repr__(self) -> str:
        if not self.binders:
            return f"(||){self.assertion!r}"
        bs = ",".join(map(repr, self.binders))
        return f"(|new {bs}|){self.assertion!r}"


def unit_frame(inst: InstanceDefinition) -> Frame:
    return Frame((), inst.unit_assertion)


def compose_frames(inst: InstanceDefinition, f1: Frame, f2: Frame) -> Frame:
    """F1 x F2 with binders freshened apart; binder lists concatenate."""
    f1 = f1.freshened(supp(f2) | frozenset(f2.binders))
    f2 = f2.freshened(supp(f1) | frozenset(f1.binders))
    return Frame(f1.binders + f2.binders,
                 inst.compose(f1.assertion, f2.assertion))


def frame_of(inst: InstanceDefinition, agent: Agent) -> Frame:
    if isinstance(agent, AssertionAgent):
        return Frame((), agent.assertion)
    if isinstance(agent, Parallel):
        return compose_frames(inst, frame_of(inst, agent.left),
                              frame_of(inst, agent.right))
    if isinstance(agent, Restriction):
        inner = frame_of(inst, agent.body)
        inner = inner.freshened((agent.name,))
        return Frame((agent.name,) + inner.binders, inner.assertion)
    return unit_frame(inst)


def frame_entails(inst: InstanceDefinition, frame: Frame, cond) -> bool:
    """(nu b)Psi entails phi when some alpha-variant has b # phi and Psi |- phi."""
    fr = frame.freshened(supp(cond))
    return inst.entails(fr.assertion, cond)
