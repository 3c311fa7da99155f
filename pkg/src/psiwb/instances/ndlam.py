"""Lambda calculus with erratic choice as the data language.

One sort, and patterns are single names: an input ``a(\\y)y`` receives any
term and binds ``y``.  Matching evaluates: the match solutions for a
received term are all of its reduction-normal forms, so a nondeterministic
term hands the input each possible result.  Substitution itself stays
purely syntactic (capture-avoiding replacement, no evaluation), since a
partial nondeterministic evaluator cannot live inside a function that must
return one term.
"""

from __future__ import annotations

from ..instance import InstanceDefinition
from ..names import Name, Sort, fresh_name, supp
from ..rewrite import lambda_substitute, normal_form_set
from ..surface import (ElaborationError, Elaborator, SApp, SChoice, SId,
                       SLam, TrivialLogic)
from ..terms import BOT, TOP, UNIT, App, Choice, Lam

LSORT = Sort("s")


def ndlam_normal_forms(term, fuel: int = 500) -> frozenset:
    """All reduction-normal forms of ``term``; errors if fuel runs out."""
    return normal_form_set(term, fuel)


def is_lambda_term(term) -> bool:
    if isinstance(term, Name):
        return True
    if isinstance(term, (App, Choice)):
        kids = ((term.fn, term.arg) if isinstance(term, App)
                else (term.left, term.right))
        return all(is_lambda_term(k) for k in kids)
    if isinstance(term, Lam):
        return is_lambda_term(term.body)
    return False


def ndlam_substitute(term, sub):
    """Simultaneous capture-avoiding substitution on lambda terms."""
    if isinstance(term, Name):
        return sub.get(term, term)
    if isinstance(term, App):
        return App(ndlam_substitute(term.fn, sub), ndlam_substitute(term.arg, sub))
    if isinstance(term, Choice):
        return Choice(ndlam_substitute(term.left, sub),
                      ndlam_substitute(term.right, sub))
    if isinstance(term, Lam):
        live = [(n, t) for n, t in sub.pairs
                if n != term.binder and n in supp(term.body)]
        if not live:
            return term
        body, binder = term.body, term.binder
        if any(binder in supp(t) for _, t in live):
            avoid = supp(body) | {n for n, _ in live}
            for _, t in live:
                avoid |= supp(t)
            nb = fresh_name(binder.sort, avoid, base=binder.base)
            body, binder = lambda_substitute(body, binder, nb), nb
        return Lam(binder, ndlam_substitute(body, _Pairs(tuple(live))))
    raise TypeError(f"not a lambda term: {term!r}")


class _Pairs:
    """Minimal substitution view over a fixed pair tuple."""

    __slots__ = ("pairs", "_map")

    def __init__(self, pairs: tuple):
        self.pairs = pairs
        self._map = dict(pairs)

    def get(self, name, default=None):
        return self._map.get(name, default)


def ndlam_binders(pattern):
    if isinstance(pattern, Name):
        return (frozenset((pattern,)),)
    return ()


def ndlam_match(obj, binders, pattern, fuel: int = 500):
    if not (isinstance(pattern, Name) and tuple(binders) == (pattern,)):
        return ()
    if not is_lambda_term(obj):
        return ()
    normals = ndlam_normal_forms(obj, fuel)
    return tuple((nf,) for nf in sorted(normals, key=repr))


def _entails_top(psi, cond) -> bool:
    return cond == TOP


def _ident_condition(m, k):
    return TOP if m == k else BOT


def _term_gen(rng, names, depth: int = 3):
    pool = sorted((n for n in names if isinstance(n, Name)), key=lambda n: n.key)
    if not pool:
        pool = [Name("z", 0, LSORT)]

    def go(d):
        roll = rng.random()
        if d <= 0 or roll < 0.35:
            return rng.choice(pool)
        if roll < 0.6:
            return App(go(d - 1), go(d - 1))
        if roll < 0.8:
            x = rng.choice(pool)
            return Lam(x, go(d - 1))
        return Choice(go(d - 1), go(d - 1))

    return go(depth)


def _messages(sort, names):
    pool = sorted((n for n in names if isinstance(n, Name)), key=lambda n: n.key)
    out = list(pool)
    z = fresh_name(LSORT, set(pool), base="z")
    out.append(Lam(z, z))
    if pool:
        out.append(Lam(z, App(z, pool[0])))
    return tuple(out)


class NdlamElaborator(TrivialLogic, Elaborator):
    def term(self, s, env):
        if isinstance(s, SId):
            return self.lookup(s.ident, env)
        if isinstance(s, SLam):
            binder = Name(s.var, 0, LSORT)
            inner = dict(env)
            inner[s.var] = binder
            return Lam(binder, self.term(s.body, inner))
        if isinstance(s, SApp):
            return App(self.term(s.fn, env), self.term(s.arg, env))
        if isinstance(s, SChoice):
            return Choice(self.term(s.left, env), self.term(s.right, env))
        raise ElaborationError(f"not a lambda term: {s!r}")

    def binder_sorts(self, spattern, binder_idents, subject_sort, env):
        return {b: LSORT for b in binder_idents}


def ndlam_instance() -> InstanceDefinition:
    return InstanceDefinition(
        name="ndlam",
        sorts=(LSORT,),
        restrictable=frozenset((LSORT,)),
        can_receive=frozenset(((LSORT, LSORT),)),
        can_send=frozenset(((LSORT, LSORT),)),
        can_subst_by=frozenset(((LSORT, LSORT),)),
        unit_assertion=UNIT,
        compose=lambda a, b: UNIT,
        entails=_entails_top,
        channel_eq_condition=_ident_condition,
        sort_of=lambda t: LSORT,
        substitute_term=ndlam_substitute,
        match=ndlam_match,
        pattern_binders=ndlam_binders,
        condition_enumerator=lambda names: (TOP, BOT),
        assertion_enumerator=lambda: (UNIT,),
        term_generator=_term_gen,
        pattern_generator=lambda rng, names: rng.choice(
            sorted((n for n in names if isinstance(n, Name)), key=lambda n: n.key)),
        condition_generator=lambda rng, names: TOP if rng.random() < 0.7 else BOT,
        assertion_generator=lambda rng, names: UNIT,
        message_generator=_messages,
        elaborate=NdlamElaborator(),
        notes={"about": "lambda terms with erratic choice; matching evaluates"},
    )
