"""Normalization under the structural laws, and bounded structural congruence.

``canonical_form`` rewrites an agent to a representative of its structural
congruence class.  Parallel compositions are flattened, stripped of nil
components, and sorted under a total syntactic order; vacuous restrictions
vanish; every other restriction is hoisted as far outward as binding
permits: past parallel siblings, past prefixes, and out of a case when
every branch offers a binder of the same sort.  A law's freshness side
condition never blocks hoisting outright, because a restriction binder can
always be alpha-renamed first; renaming happens exactly when a spelling
collision would otherwise violate the condition.  Binder nests are ordered
by first occurrence in the body (unused binders last, by sort then name).

Replication unfolding is deliberately left out of normalization: the law
!P = P|!P has no terminating orientation.  ``struct_congruent`` applies it
up to an explicit budget on either side instead, so its verdict is sound
always and complete only up to the budget.
"""

from __future__ import annotations

import dataclasses

from .agents import (
    NIL, Agent, AssertionAgent, Case, Input, Output, Parallel, Replication,
    Restriction,
)
from .names import Name, alpha_canonical, fresh_name, supp, sw

_NEVER = 1 << 30


def canonical_form(agent: Agent) -> Agent:
    avoid = set(supp(agent))
    return _order(_norm(agent, avoid), frozenset())


def _norm(p: Agent, avoid: set) -> Agent:
    if isinstance(p, Case):
        return _case(p, avoid)
    if isinstance(p, AssertionAgent):
        return p
    if isinstance(p, Replication):
        bs, core = _peel(_norm(p.body, avoid), avoid)
        return Replication(_renest(bs, core))
    if isinstance(p, Restriction):
        body = _norm(p.body, avoid)
        # (new a)P = P for unused a: P = P|0 = P|(new a)0 = (new a)(P|0)
        if p.name not in supp(body):
            return body
        return Restriction(p.name, body)
    if isinstance(p, Output):
        bs, core = _peel(_norm(p.cont, avoid), avoid)
        bs, core = _unclash(bs, core, supp(p.subject) | supp(p.obj), avoid)
        return _renest(bs, Output(p.subject, p.obj, core))
    if isinstance(p, Input):
        bs, core = _peel(_norm(p.cont, avoid), avoid)
        blocked = supp(p.subject) | supp(p.pattern) | frozenset(p.binders)
        bs, core = _unclash(bs, core, blocked, avoid)
        return _renest(bs, Input(p.subject, p.binders, p.pattern, core))
    if isinstance(p, Parallel):
        return _parallel(p, avoid)
    raise TypeError(f"not an agent: {p!r}")


# -- restriction mobility ------------------------------------------------------


def _peel(p: Agent, avoid: set):
    """Split a leading restriction nest into (distinct binders, body)."""
    binders: list = []
    while isinstance(p, Restriction):
        b, body = p.name, p.body
        if b in binders:  # shadowed twice in one nest; rename the inner one
            nb = fresh_name(b.sort, avoid | set(binders) | supp(body), base=b.base)
            body = sw(b, nb, body)
            b = nb
        binders.append(b)
        avoid.add(b)
        p = body
    return binders, p


def _unclash(binders: list, core: Agent, blocked: frozenset, avoid: set):
    """Rename any binder that collides with ``blocked`` so all can hoist."""
    out = []
    for i, b in enumerate(binders):
        if b in blocked:
            nb = fresh_name(b.sort, avoid | blocked | supp(core) | set(binders),
                            base=b.base)
            avoid.add(nb)
            tail = sw(b, nb, tuple(binders[i + 1:]))
            binders[i + 1:] = list(tail)
            core = sw(b, nb, core)
            b = nb
        out.append(b)
    return out, core


def _renest(binders, core: Agent) -> Agent:
    """Wrap ``core`` in its binder nest; a nest over nil erases itself."""
    if core == NIL:
        return NIL
    for b in reversed(binders):
        core = Restriction(b, core)
    return core


def _order(p: Agent, bound: frozenset) -> Agent:
    """Second pass: fix element and binder order, outside in.

    Ordering is separate from hoisting because a component's sort key has
    to treat every enclosing binder as bound, including binders that ended
    up nested above a prefix over this parallel.  Those are only all known
    once hoisting has finished, so the first pass builds shape and this
    pass walks it from the root carrying the accumulated bound set.
    """
    if isinstance(p, Restriction):
        binders = []
        while isinstance(p, Restriction):
            binders.append(p.name)
            p = p.body
        core = _order(p, bound | frozenset(binders))
        for b in reversed(_order_binders(binders, core)):
            core = Restriction(b, core)
        return core
    if isinstance(p, Parallel):
        elems = [_order(e, bound) for e in _flatten(p)]
        elems.sort(key=lambda e: (_scoped_key(e, bound), repr(alpha_canonical(e))))
        core = elems[0]
        for e in elems[1:]:
            core = Parallel(core, e)
        return core
    if isinstance(p, Output):
        return Output(p.subject, p.obj, _order(p.cont, bound))
    if isinstance(p, Input):
        return Input(p.subject, p.binders, p.pattern,
                     _order(p.cont, bound | frozenset(p.binders)))
    if isinstance(p, Case):
        return Case(tuple((c, _order(b, bound)) for c, b in p.branches))
    if isinstance(p, Replication):
        return Replication(_order(p.body, bound))
    return p


def _order_binders(binders, core: Agent) -> list:
    first: dict = {}
    # inner binders canonicalize to reserved names, so every remaining
    # occurrence of one of ours is a free occurrence
    _name_stream(alpha_canonical(core), first)
    return sorted(binders, key=lambda b: (first.get(b, _NEVER), b.sort.id, b.key))


def _name_stream(x, first: dict, pos: list = None) -> None:
    if pos is None:
        pos = [0]
    if isinstance(x, Name):
        first.setdefault(x, pos[0])
        pos[0] += 1
        return
    if isinstance(x, tuple):
        for i in x:
            _name_stream(i, first, pos)
        return
    if isinstance(x, frozenset):
        for i in sorted(x, key=repr):
            _name_stream(i, first, pos)
        return
    if x is None or isinstance(x, (str, int, bool)):
        return
    for f in dataclasses.fields(x):
        _name_stream(getattr(x, f.name), first, pos)


# -- parallel composition ------------------------------------------------------


def _parallel(p: Parallel, avoid: set) -> Agent:
    lbs, lcore = _peel(_norm(p.left, avoid), avoid)
    rbs, rcore = _peel(_norm(p.right, avoid), avoid)
    # scope extension: binders cross the sibling, renamed if it knows the name
    lbs, lcore = _unclash(lbs, lcore, supp(rcore) | frozenset(rbs), avoid)
    rbs, rcore = _unclash(rbs, rcore, supp(lcore) | frozenset(lbs), avoid)
    binders = lbs + rbs
    elems = [e for e in _flatten(lcore) + _flatten(rcore) if e != NIL]
    if not elems:
        core = NIL
    else:
        core = elems[0]
        for e in elems[1:]:
            core = Parallel(core, e)
    return _renest(binders, core)


def _flatten(p: Agent) -> list:
    if isinstance(p, Parallel):
        return _flatten(p.left) + _flatten(p.right)
    return [p]


def _scoped_key(elem: Agent, binders) -> str:
    """Sort key that is blind to the spelling of the shared binders."""
    mine = _order_binders([b for b in binders if b in supp(elem)], elem)
    probe = elem
    for b in reversed(mine):
        probe = Restriction(b, probe)
    return repr(alpha_canonical(probe))


# -- case ------------------------------------------------------------------------


def _case(p: Case, avoid: set) -> Agent:
    if not p.branches:
        return NIL
    branches = [(cond, _norm(body, avoid)) for cond, body in p.branches]
    hoisted: list = []
    while True:
        peeled = [(_peel(body, avoid), cond) for cond, body in branches]
        if any(not bs for (bs, _), _ in peeled):
            break
        want = peeled[0][0][0][0].sort
        chosen = []
        for (bs, core), cond in peeled:
            b = next((x for x in bs if x.sort == want), None)
            if b is None:
                break
            rest = _renest([x for x in bs if x != b], core)
            chosen.append((b, rest, cond))
        if len(chosen) != len(branches):
            break
        names = {b for b, _, _ in chosen}
        cond_supp = supp(tuple(cond for _, _, cond in chosen))
        if len(names) == 1 and next(iter(names)) not in cond_supp:
            nb = next(iter(names))
        else:
            nb = fresh_name(want, avoid | supp(tuple(r for _, r, _ in chosen))
                            | cond_supp, base="nu")
            avoid.add(nb)
        branches = [(cond, sw(b, nb, rest) if b != nb else rest)
                    for b, rest, cond in chosen]
        hoisted.append(nb)
    rebuilt = [(cond, _renest(*_peel(body, avoid)))
               for (_, body), (_, cond) in zip(branches, peeled)]
    return _renest(hoisted, Case(tuple(rebuilt)))


# -- bounded structural congruence -------------------------------------------------


def struct_congruent(p: Agent, q: Agent, unfold_budget: int = 1) -> bool:
    """Equality of canonical forms, with up to ``unfold_budget`` applications
    of !R -> R|!R allowed on either side.  Sound for any budget; a False at
    budget b only means no witness was found within b unfoldings."""
    return bool(_unfold_keys(p, unfold_budget) & _unfold_keys(q, unfold_budget))


def _unfold_keys(p: Agent, budget: int) -> set:
    frontier = [p]
    keys = {repr(alpha_canonical(canonical_form(p)))}
    for _ in range(budget):
        step = []
        for agent in frontier:
            for variant in _single_unfolds(agent):
                key = repr(alpha_canonical(canonical_form(variant)))
                if key not in keys:
                    keys.add(key)
                    step.append(variant)
        if not step:
            break
        frontier = step
    return keys


def _single_unfolds(p: Agent):
    """Each agent obtainable by unfolding exactly one replication subterm."""
    if isinstance(p, Replication):
        yield Parallel(p.body, p)
        for u in _single_unfolds(p.body):
            yield Replication(u)
    elif isinstance(p, Restriction):
        for u in _single_unfolds(p.body):
            yield Restriction(p.name, u)
    elif isinstance(p, Parallel):
        for u in _single_unfolds(p.left):
            yield Parallel(u, p.right)
        for u in _single_unfolds(p.right):
            yield Parallel(p.left, u)
    elif isinstance(p, Output):
        for u in _single_unfolds(p.cont):
            yield Output(p.subject, p.obj, u)
    elif isinstance(p, Input):
        for u in _single_unfolds(p.cont):
            yield Input(p.subject, p.binders, p.pattern, u)
    elif isinstance(p, Case):
        for i, (cond, body) in enumerate(p.branches):
            for u in _single_unfolds(body):
                branches = list(p.branches)
                branches[i] = (cond, u)
                yield Case(tuple(branches))
