"""Asymmetric-crypto calculus with pattern-matching inputs.

Channels and messages are implementable terms; patterns may additionally use
``encinv``, whose substitution image becomes a real ciphertext once its key
argument resolves to a ``dKey``.  Binder sets are decided by message
derivability: you may bind exactly what you could deduce from the rest of
the pattern.
"""

from __future__ import annotations

from ..instance import InstanceDefinition, Substitution, subst_from_lists
from ..names import Name
from ..surface import (ElaborationError, Elaborator, SCall, SId, SParen,
                       TrivialLogic)
from ..terms import BOT, Func, Pair, TOP, UNIT, UnitTerm
from .dy import (ILL, IMPL, PAT, is_message, message_sort, pmspi_binders,
                 pmspi_substitute)

_ARITY = {"eKey": 1, "dKey": 1, "enc": 2, "encinv": 2}


def pmspi_match(obj, binders: tuple, pattern) -> tuple:
    """Solutions of obj = pattern[solution/binders] under the collapsing
    substitution; an ``encinv`` pattern node therefore matches a ciphertext
    whose key half is an ``eKey``, binding the key seed through ``dKey``."""
    binder_set = set(binders)

    def go(pat, t, bound):
        if isinstance(pat, Name):
            if pat in binder_set:
                if pat in bound:
                    return [bound] if bound[pat] == t else []
                out = dict(bound)
                out[pat] = t
                return [out]
            return [bound] if pat == t else []
        if isinstance(pat, UnitTerm):
            return [bound] if isinstance(t, UnitTerm) else []
        if isinstance(pat, Pair):
            if not isinstance(t, Pair):
                return []
            return [b2 for b1 in go(pat.left, t.left, bound)
                    for b2 in go(pat.right, t.right, b1)]
        if isinstance(pat, Func):
            outs = []
            if (isinstance(t, Func) and t.symbol == pat.symbol
                    and len(t.args) == len(pat.args)):
                partial = [bound]
                for p, a in zip(pat.args, t.args):
                    partial = [b2 for b1 in partial for b2 in go(p, a, b1)]
                outs.extend(partial)
            if (pat.symbol == "encinv" and isinstance(t, Func)
                    and t.symbol == "enc" and isinstance(t.args[1], Func)
                    and t.args[1].symbol == "eKey"):
                seed = t.args[1].args[0]
                for b1 in go(pat.args[0], t.args[0], bound):
                    outs.extend(go(pat.args[1], Func("dKey", (seed,)), b1))
            return outs
        return []

    seen = set()
    sols = []
    for bound in go(pattern, obj, {}):
        if set(bound) != binder_set:
            continue
        lt = tuple(bound[x] for x in binders)
        if lt in seen:
            continue
        sub = subst_from_lists(binders, lt)
        if pmspi_substitute(pattern, sub) == obj:
            seen.add(lt)
            sols.append(lt)
    return tuple(sols)


class PmspiElaborator(TrivialLogic, Elaborator):
    """Names, unit ``()``, pair chains ``(a,b,c)``, and the four crypto
    symbols."""

    def term(self, s, env):
        if isinstance(s, SId):
            return self.lookup(s.ident, env)
        if isinstance(s, SParen):
            if not s.items:
                return UnitTerm()
            parts = [self.term(i, env) for i in s.items]
            out = parts[-1]
            for p in reversed(parts[:-1]):
                out = Pair(p, out)
            return out
        if isinstance(s, SCall):
            if s.symbol not in _ARITY:
                raise ElaborationError(f"unknown symbol {s.symbol!r}")
            if len(s.args) != _ARITY[s.symbol]:
                raise ElaborationError(
                    f"{s.symbol!r} expects {_ARITY[s.symbol]} arguments, got {len(s.args)}")
            return Func(s.symbol, tuple(self.term(a, env) for a in s.args))
        raise ElaborationError(f"not a message term: {s!r}")

    def binder_sorts(self, spattern, binder_idents, subject_sort, env):
        return {i: IMPL for i in binder_idents}


def _term_gen(rng, names, depth=3):
    pool = [n for n in names if isinstance(n, Name)]
    if depth == 0 or (pool and rng.random() < 0.35):
        return rng.choice(pool) if pool else UnitTerm()
    shape = rng.randrange(6)
    if shape == 0:
        return UnitTerm()
    if shape == 1:
        return Pair(_term_gen(rng, names, depth - 1), _term_gen(rng, names, depth - 1))
    if shape == 2:
        return Func(rng.choice(("eKey", "dKey")), (_term_gen(rng, names, depth - 1),))
    if shape in (3, 4):
        return Func("enc", (_term_gen(rng, names, depth - 1),
                            _term_gen(rng, names, depth - 1)))
    return Func("encinv", (_term_gen(rng, names, depth - 1),
                           _term_gen(rng, names, depth - 1)))


def _messages(sort, names):
    pool = sorted((n for n in names if isinstance(n, Name)), key=lambda n: n.key)
    if not pool:
        return (UnitTerm(),) if sort == IMPL else ()
    a = pool[0]
    b = pool[1] if len(pool) > 1 else pool[0]
    if sort == IMPL:
        out = list(pool)
        out += [UnitTerm(), Pair(a, b), Func("eKey", (a,)),
                Func("enc", (a, Func("eKey", (b,))))]
        return tuple(out)
    if sort == PAT:
        return (Func("encinv", (a, b)),)
    return ()


def pmspi_instance() -> InstanceDefinition:
    return InstanceDefinition(
        name="pmspi",
        sorts=(IMPL, PAT, ILL),
        restrictable=frozenset({IMPL}),
        can_receive=frozenset({(IMPL, IMPL), (IMPL, PAT)}),
        can_send=frozenset({(IMPL, IMPL)}),
        can_subst_by=frozenset({(IMPL, IMPL)}),
        unit_assertion=UNIT,
        compose=lambda a, b: UNIT,
        entails=lambda psi, cond: cond == TOP,
        channel_eq_condition=lambda m, k: TOP if m == k else BOT,
        sort_of=message_sort,
        substitute_term=pmspi_substitute,
        match=pmspi_match,
        pattern_binders=pmspi_binders,
        condition_enumerator=lambda names: (TOP, BOT),
        assertion_enumerator=lambda: (UNIT,),
        term_generator=_term_gen,
        pattern_generator=lambda rng, names: _term_gen(rng, names, depth=2),
        condition_generator=lambda rng, names: TOP if rng.random() < 0.7 else BOT,
        assertion_generator=lambda rng, names: UNIT,
        message_generator=_messages,
        elaborate=PmspiElaborator(),
        notes={
            "about": "asymmetric crypto with pattern-matching inputs",
            "is_message": is_message,
        },
    )
