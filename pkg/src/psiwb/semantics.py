"""Labelled transitions for processes under an assertion environment.

The engine derives silent steps, outputs, and input capabilities for a
well-formed agent.  Inputs are kept as capabilities rather than transitions
because input objects range over arbitrary terms: a capability packages the
subject, binders, and pattern together with the context the derivative must
be rebuilt in, and ``input_transition`` instantiates it with a concrete
received term.  Communication pairs one side's outputs against the other
side's capabilities directly, so it never needs a message universe.

Environment handling follows the assertion discipline of parallel
composition: each side of a parallel runs under the composition of the
outer environment with the other side's frame, with frame binders renamed
apart first.  Restriction binders are opened into output actions when the
object mentions them (appended to the action's opened list; see
``reorder_opened`` for the other orders), and otherwise scope over the
derivative.

All freshening draws from one shared avoid-set per top-level call, so
names invented in different branches can never collide; derived names are
fresh for the environment, the whole source agent, and every configured
message.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Mapping

from .agents import (
    NIL, Agent, AssertionAgent, Case, Input, Output, Parallel, Replication,
    Restriction, frame_of, substitute_agent, well_formed,
)
from .canon import canonical_form
from .instance import (
    InstanceDefinition, Substitution, channel_candidates, compose_assertions,
    match_pattern, subst_from_lists,
)
from .names import (
    Name, NominalValue, alpha_canonical, canon_binders, fresh_name, supp, sw,
)


# -- actions and transitions --------------------------------------------------


@dataclass(frozen=True)
class OutputAction(NominalValue):
    """``'K<(new a,b)N>``: the opened names bind into object and derivative."""

    subject: object
    opened: tuple
    obj: object

    def __repr__(self) -> str:
        if self.opened:
            bs = ",".join(map(repr, self.opened))
            return f"'{self.subject!r}<(new {bs}){self.obj!r}>"
        return f"'{self.subject!r}<{self.obj!r}>"


@dataclass(frozen=True)
class InputAction(NominalValue):
    subject: object
    obj: object

    def __repr__(self) -> str:
        return f"{self.subject!r} {self.obj!r}"


@dataclass(frozen=True)
class TauAction(NominalValue):
    def __repr__(self) -> str:
        return "tau"


TAU = TauAction()


def bound_names(action) -> tuple:
    return action.opened if isinstance(action, OutputAction) else ()


@dataclass(frozen=True)
class Transition(NominalValue):
    """``env |> source --action--> derivative``."""

    env: object
    source: Agent
    action: object
    derivative: Agent

    def support(self):
        free = supp(self.action) | supp(self.derivative)
        return supp(self.env) | supp(self.source) | (free - frozenset(bound_names(self.action)))

    def _alpha_canon(self, ren, fresh):
        opened = bound_names(self.action)
        bs, inner = canon_binders(opened, (), ren, fresh)
        action = self.action
        if opened:
            action = OutputAction(
                alpha_canonical(action.subject, ren, fresh), bs,
                alpha_canonical(action.obj, inner, fresh))
        else:
            action = alpha_canonical(action, ren, fresh)
        return Transition(
            alpha_canonical(self.env, ren, fresh),
            alpha_canonical(self.source, ren, fresh),
            action,
            alpha_canonical(self.derivative, inner, fresh))

    def __repr__(self) -> str:
        return f"{self.env!r} |> {self.source!r} --{self.action!r}--> {self.derivative!r}"


def _step_key(action, derivative) -> str:
    """Alpha-class key of an (action, derivative) pair, opened names bound."""
    probe = Transition(None, NIL, action, derivative)
    return repr(alpha_canonical(probe))


# -- input capabilities --------------------------------------------------------


@dataclass(frozen=True)
class InputCapability:
    """A pending input: instantiate with a received term to get transitions.

    ``context`` lists the wrappers between the input prefix and the root,
    innermost first: ``("nu", name)`` restores a restriction, ``("parL", Q)``
    puts the derivative left of a bystander, ``("parR", Q)`` right of one.
    ``scoped`` caches the restriction names, which a received object must
    avoid (the freshness side condition of scope); ``input_transition``
    alpha-renames them away when a received term collides.
    """

    subject: object
    binders: tuple
    pattern: object
    cont: Agent
    context: tuple = ()
    scoped: frozenset = frozenset()
    env: object = None
    source: Agent = None
    inst: InstanceDefinition = field(default=None, repr=False, compare=False)

    def resume(self, values) -> Agent:
        """The derivative for one tuple of matched binder values."""
        values = tuple(values)
        for b in self.scoped:
            if any(b in supp(v) for v in values):
                raise ValueError(
                    f"matched value captures restricted name {b!r}; rescope first")
        sub = subst_from_lists(self.binders, values)
        body = substitute_agent(self.inst, self.cont, sub)
        for kind, payload in self.context:
            if kind == "nu":
                body = Restriction(payload, body)
            elif kind == "parL":
                body = Parallel(body, payload)
            else:
                body = Parallel(payload, body)
        return body

    def __repr__(self) -> str:
        bs = ",".join(map(repr, self.binders))
        return f"<input {self.subject!r}(\\{bs}){self.pattern!r} ...>"


def _rescope(cap: InputCapability, clash: frozenset) -> InputCapability:
    """Alpha-rename the capability's restriction names away from ``clash``."""
    avoid = set(clash) | supp(cap.cont) | supp(cap.pattern) | cap.scoped
    for _, payload in cap.context:
        avoid |= supp(payload)
    bundle = (cap.binders, cap.pattern, cap.cont, cap.context)
    scoped = set(cap.scoped)
    for b in sorted(cap.scoped & clash, key=lambda n: n.key):
        nb = fresh_name(b.sort, avoid, base=b.base)
        avoid.add(nb)
        bundle = sw(b, nb, bundle)
        scoped.discard(b)
        scoped.add(nb)
    binders, pattern, cont, context = bundle
    return replace(cap, binders=binders, pattern=pattern, cont=cont,
                   context=context, scoped=frozenset(scoped))


def input_transition(cap: InputCapability, obj) -> tuple:
    """Transitions of the capability receiving ``obj``, one per match."""
    clash = cap.scoped & supp(obj)
    if clash:
        cap = _rescope(cap, clash)
    out = []
    for values in match_pattern(cap.inst, obj, cap.binders, cap.pattern):
        action = InputAction(cap.subject, obj)
        out.append(Transition(cap.env, cap.source, action, cap.resume(values)))
    return _dedup_transitions(out)


# -- configuration -------------------------------------------------------------


@dataclass(frozen=True)
class SemanticsConfig:
    """Exploration knobs.

    ``replication_unfold`` caps how many times replications may unfold along
    one derivation (at least 1; 2 lets two copies of a replicated agent
    communicate).  ``messages`` maps sorts to the finite term pools used for
    free input labels; communication does not consult it.  ``state_budget``
    bounds the states ``tau_closure`` may visit.
    """

    replication_unfold: int = 2
    messages: Mapping = field(default_factory=dict)
    state_budget: int = 2000

    def __post_init__(self):
        if self.replication_unfold < 1:
            raise ValueError("replication_unfold must be at least 1")

    def message_pool(self) -> tuple:
        out = []
        for sort in sorted(self.messages, key=lambda s: s.id):
            out.extend(self.messages[sort])
        return tuple(out)


@dataclass(frozen=True)
class Commitments:
    taus: tuple
    outputs: tuple
    inputs: tuple


# -- the rules -----------------------------------------------------------------


class _Engine:
    """One commitments computation; carries the shared avoid-set."""

    def __init__(self, inst: InstanceDefinition, cfg: SemanticsConfig, avoid: set):
        self.inst = inst
        self.cfg = cfg
        self.avoid = avoid

    def fresh(self, name: Name) -> Name:
        nb = fresh_name(name.sort, self.avoid, base=name.base)
        self.avoid.add(nb)
        return nb

    def commit(self, psi, agent: Agent, budget: int):
        """(taus, outputs, capabilities) relative to ``agent``.

        taus and outputs are (action, derivative) pairs; capabilities carry
        context relative to ``agent``.
        """
        inst = self.inst
        if isinstance(agent, Output):
            outs = []
            for k in channel_candidates(inst, psi, agent.subject):
                if inst.entails(psi, inst.channel_eq_condition(agent.subject, k)):
                    outs.append((OutputAction(k, (), agent.obj), agent.cont))
            return [], outs, []
        if isinstance(agent, Input):
            caps = []
            for k in channel_candidates(inst, psi, agent.subject):
                if inst.entails(psi, inst.channel_eq_condition(agent.subject, k)):
                    caps.append(InputCapability(
                        k, agent.binders, agent.pattern, agent.cont))
            return [], [], caps
        if isinstance(agent, Case):
            taus, outs, caps = [], [], []
            for cond, branch in agent.branches:
                if inst.entails(psi, cond):
                    t, o, c = self.commit(psi, branch, budget)
                    taus += t
                    outs += o
                    caps += c
            return taus, outs, caps
        if isinstance(agent, AssertionAgent):
            return [], [], []
        if isinstance(agent, Replication):
            if budget <= 0:
                return [], [], []
            return self.commit(psi, Parallel(agent.body, agent), budget - 1)
        if isinstance(agent, Restriction):
            return self._restriction(psi, agent, budget)
        if isinstance(agent, Parallel):
            return self._parallel(psi, agent, budget)
        raise TypeError(f"not an agent: {agent!r}")

    def _restriction(self, psi, agent: Restriction, budget: int):
        b, body = agent.name, agent.body
        if b in self.avoid or b in supp(psi):
            nb = self.fresh(b)
            body = sw(b, nb, body)
            b = nb
        else:
            self.avoid.add(b)
        taus, outs, caps = self.commit(psi, body, budget)
        rtaus = [(act, Restriction(b, der)) for act, der in taus]
        routs = []
        for act, der in outs:
            if b in supp(act.subject):
                continue  # no rule: the subject would escape its binder
            if b in supp(act.obj):
                routs.append((OutputAction(act.subject, act.opened + (b,), act.obj), der))
            else:
                routs.append((act, Restriction(b, der)))
        rcaps = []
        for cap in caps:
            if b in supp(cap.subject):
                continue
            rcaps.append(replace(
                cap, context=cap.context + (("nu", b),), scoped=cap.scoped | {b}))
        return rtaus, routs, rcaps

    def _parallel(self, psi, agent: Parallel, budget: int):
        inst = self.inst
        left, right = agent.left, agent.right
        fl = frame_of(inst, left).freshened(self.avoid)
        fr = frame_of(inst, right).freshened(self.avoid | frozenset(fl.binders))
        self.avoid.update(fl.binders)
        self.avoid.update(fr.binders)
        env_left = compose_assertions(inst, fr.assertion, psi)
        env_right = compose_assertions(inst, fl.assertion, psi)
        ltaus, louts, lcaps = self.commit(env_left, left, budget)
        rtaus, routs, rcaps = self.commit(env_right, right, budget)

        taus = [(act, Parallel(der, right)) for act, der in ltaus]
        taus += [(act, Parallel(left, der)) for act, der in rtaus]
        outs = []
        for act, der in louts:
            assert not set(act.opened) & supp(right)
            outs.append((act, Parallel(der, right)))
        for act, der in routs:
            assert not set(act.opened) & supp(left)
            outs.append((act, Parallel(left, der)))
        caps = [replace(c, context=c.context + (("parL", right),)) for c in lcaps]
        caps += [replace(c, context=c.context + (("parR", left),)) for c in rcaps]

        com_env = compose_assertions(inst, psi, fl.assertion, fr.assertion)
        taus += self._com(com_env, louts, rcaps, left_sends=True)
        taus += self._com(com_env, routs, lcaps, left_sends=False)
        return taus, outs, caps

    def _com(self, com_env, outs, caps, left_sends: bool):
        """Pair outputs of one side with capabilities of the other."""
        inst = self.inst
        taus = []
        for act, sender_der in outs:
            for cap in caps:
                eq = inst.channel_eq_condition(act.subject, cap.subject)
                if not inst.entails(com_env, eq):
                    continue
                assert not cap.scoped & supp(act.obj)
                for values in match_pattern(inst, act.obj, cap.binders, cap.pattern):
                    receiver_der = replace(cap, inst=inst).resume(values)
                    pair = (Parallel(sender_der, receiver_der) if left_sends
                            else Parallel(receiver_der, sender_der))
                    for b in reversed(act.opened):
                        pair = Restriction(b, pair)
                    taus.append((TAU, pair))
        return taus


def _dedup_transitions(items) -> tuple:
    seen = {}
    for t in items:
        seen.setdefault(repr(alpha_canonical(t)), t)
    return tuple(seen[k] for k in sorted(seen))


def commitments(inst: InstanceDefinition, psi, agent: Agent,
                cfg: SemanticsConfig | None = None) -> Commitments:
    """All derivable steps of ``agent`` under ``psi``: silent and output
    transitions, plus input capabilities awaiting a received term."""
    cfg = cfg or SemanticsConfig()
    report = well_formed(inst, agent)
    if not report.ok:
        raise ValueError(f"agent is not well-formed:\n{report!r}")
    avoid = set(supp(agent) | supp(psi))
    avoid |= supp(cfg.message_pool())
    engine = _Engine(inst, cfg, avoid)
    taus, outs, caps = engine.commit(psi, agent, cfg.replication_unfold)

    def finish(pairs):
        return _dedup_transitions(
            Transition(psi, agent, act, der) for act, der in pairs)

    caps = [replace(c, env=psi, source=agent, inst=inst) for c in caps]
    seen = {}
    for c in caps:
        key = repr((c.subject, c.binders, c.pattern, c.cont, c.context))
        seen.setdefault(key, c)
    return Commitments(
        taus=finish(taus),
        outputs=finish(outs),
        inputs=tuple(seen[k] for k in sorted(seen)),
    )


def transitions(inst: InstanceDefinition, psi, agent: Agent,
                cfg: SemanticsConfig | None = None) -> tuple:
    """Every transition: silent, output, and free inputs over the configured
    message pools."""
    cfg = cfg or SemanticsConfig()
    com = commitments(inst, psi, agent, cfg)
    out = list(com.taus) + list(com.outputs)
    pool = cfg.message_pool()
    for cap in com.inputs:
        for obj in pool:
            out.extend(input_transition(cap, obj))
    return _dedup_transitions(out)


def reorder_opened(t: Transition, order) -> Transition:
    """The same transition with its opened names permuted into ``order``.

    Any permutation of the opened names labels a derivable transition; the
    engine reports one canonical order, this recovers the others.
    """
    act = t.action
    opened = bound_names(act)
    order = tuple(order)
    if sorted(order) != list(range(len(opened))):
        raise ValueError(f"{order!r} is not a permutation of 0..{len(opened) - 1}")
    action = OutputAction(act.subject, tuple(opened[i] for i in order), act.obj)
    return Transition(t.env, t.source, action, t.derivative)


# -- weak reachability ---------------------------------------------------------


@dataclass(frozen=True)
class TauClosure:
    states: tuple
    truncated: bool

    def __contains__(self, agent) -> bool:
        key = repr(alpha_canonical(canonical_form(agent)))
        return any(repr(alpha_canonical(s)) == key for s in self.states)


def tau_closure(inst: InstanceDefinition, psi, agent: Agent,
                cfg: SemanticsConfig | None = None) -> TauClosure:
    """All agents reachable by silent steps, up to structural laws.

    States are kept as canonical forms and deduplicated by alpha-class, so a
    tau loop that only grows inert debris (nil components, spent
    restrictions) revisits a known state and terminates.  Breadth-first with
    a state budget; truncation is reported, never silent."""
    cfg = cfg or SemanticsConfig()
    seen = set()
    states = []
    frontier = [canonical_form(agent)]
    while frontier:
        p = frontier.pop(0)
        key = repr(alpha_canonical(p))
        if key in seen:
            continue
        if len(seen) >= cfg.state_budget:
            return TauClosure(tuple(states), True)
        seen.add(key)
        states.append(p)
        for t in commitments(inst, psi, p, cfg).taus:
            frontier.append(canonical_form(t.derivative))
    return TauClosure(tuple(states), False)


# -- serialization -------------------------------------------------------------


def action_json(action) -> dict:
    if isinstance(action, TauAction):
        return {"kind": "tau", "subject": None, "opened": [], "object": None}
    if isinstance(action, OutputAction):
        return {"kind": "output", "subject": repr(action.subject),
                "opened": [repr(n) for n in action.opened],
                "object": repr(action.obj)}
    return {"kind": "input", "subject": repr(action.subject),
            "opened": [], "object": repr(action.obj)}


def transition_json(t: Transition) -> dict:
    return {
        "env": repr(t.env),
        "source": repr(t.source),
        "action": action_json(t.action),
        "derivative": repr(t.derivative),
    }
