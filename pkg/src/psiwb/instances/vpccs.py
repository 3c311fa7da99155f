"""Value-passing CCS and its pi-calculus variant.

Channels carry data values (here: naturals and booleans with ``+``, ``>``
and literals), never channels; a separate name sort ``exp`` gives the
expression variables.  Substitution evaluates: replacing the variables of
an expression and closing it yields its value, so ``(x+3)[4/x]`` is ``7``.
Conditions are boolean expressions, and only the literal true value is
ever entailed, which makes ``case x>3 : P`` wait until reception closes
the test.

The pi variant keeps everything but lets channels also carry channel
names, restoring dynamic connectivity.
"""

from __future__ import annotations

from ..instance import InstanceDefinition
from ..names import Name, Sort, supp
from ..surface import (ElaborationError, Elaborator, SBin, SId, SInt,
                       TrivialLogic)
from ..terms import BOT, TOP, UNIT, BinOp, BoolLit, IntLit

CHAN = Sort("chan")
EXP = Sort("exp")
VALUE = Sort("value", name_sort=False)


def is_value(t) -> bool:
    return isinstance(t, (IntLit, BoolLit))


def is_expression(t) -> bool:
    if isinstance(t, Name):
        return t.sort == EXP
    if is_value(t):
        return True
    if isinstance(t, BinOp):
        return t.op in ("+", ">") and is_expression(t.left) and is_expression(t.right)
    return False


def vpccs_eval(e):
    """Evaluate a closed expression to its value; open ones are unchanged."""
    if not is_expression(e) or supp(e):
        return e
    return _ev(e)


def _ev(e):
    if is_value(e):
        return e
    left, right = _ev(e.left), _ev(e.right)
    if not (isinstance(left, IntLit) and isinstance(right, IntLit)):
        return e  # ill-typed, e.g. T+1; leave it stuck
    if e.op == "+":
        return IntLit(left.value + right.value)
    return BoolLit(left.value > right.value)


def _replace(e, sub):
    if isinstance(e, Name):
        return sub.get(e, e)
    if isinstance(e, BinOp):
        return BinOp(e.op, _replace(e.left, sub), _replace(e.right, sub))
    return e


def vpccs_substitute(t, sub):
    """Replace names, then evaluate any expression this closes."""
    if isinstance(t, Name):
        return sub.get(t, t)
    return vpccs_eval(_replace(t, sub))


def vpccs_sort(t) -> Sort:
    if isinstance(t, Name):
        return t.sort
    return VALUE if is_value(t) else EXP


def vpccs_binders(pattern):
    if isinstance(pattern, Name):
        return (frozenset((pattern,)),)
    return ()


def vpccs_match(obj, binders, pattern):
    if (isinstance(pattern, Name) and tuple(binders) == (pattern,)
            and is_value(obj)):
        return ((obj,),)
    return ()


def vppi_match(obj, binders, pattern):
    if isinstance(pattern, Name) and tuple(binders) == (pattern,):
        if is_value(obj) or (isinstance(obj, Name) and obj.sort == CHAN):
            return ((obj,),)
    return ()


def _entails_top(psi, cond) -> bool:
    return cond == TOP


def _chan_eq(m, k):
    return TOP if isinstance(m, Name) and m == k else BOT


def _conditions(names):
    pool = sorted((n for n in names if isinstance(n, Name) and n.sort == EXP),
                  key=lambda n: n.key)
    tests = tuple(BinOp(">", n, IntLit(3)) for n in pool)
    return (TOP, BOT) + tests


def _term_gen(rng, names, depth: int = 2):
    pool = sorted((n for n in names if isinstance(n, Name)), key=lambda n: n.key)
    exps = [n for n in pool if n.sort == EXP]

    def expr(d):
        roll = rng.random()
        if d <= 0 or roll < 0.4:
            if exps and roll < 0.2:
                return rng.choice(exps)
            return IntLit(rng.randrange(0, 5))
        return BinOp("+", expr(d - 1), expr(d - 1))

    if pool and rng.random() < 0.3:
        return rng.choice(pool)
    return expr(depth)


def _cond_gen(rng, names):
    roll = rng.random()
    if roll < 0.4:
        return TOP
    if roll < 0.6:
        return BOT
    return BinOp(">", _term_gen(rng, names, 1), IntLit(rng.randrange(0, 5)))


def _values():
    return tuple(IntLit(i) for i in range(4)) + (TOP, BOT)


def _messages(sort, names):
    pool = sorted((n for n in names if isinstance(n, Name)), key=lambda n: n.key)
    if sort == VALUE:
        return _values()
    if sort == CHAN:
        return tuple(n for n in pool if n.sort == CHAN)
    exps = tuple(n for n in pool if n.sort == EXP)
    return _values() + exps


class VpccsElaborator(TrivialLogic, Elaborator):
    def term(self, s, env):
        if isinstance(s, SId):
            if s.ident not in env:
                if s.ident == "T":
                    return TOP
                if s.ident == "F":
                    return BOT
            return self.lookup(s.ident, env)
        if isinstance(s, SInt):
            return IntLit(s.value)
        if isinstance(s, SBin) and s.op in ("+", ">"):
            return BinOp(s.op, self.term(s.left, env), self.term(s.right, env))
        raise ElaborationError(f"not a value expression: {s!r}")

    def condition(self, s, env):
        cond = self.term(s, env)
        if isinstance(cond, BoolLit) or (isinstance(cond, BinOp) and cond.op == ">"):
            return cond
        raise ElaborationError(f"not a boolean expression: {s!r}")

    def binder_sorts(self, spattern, binder_idents, subject_sort, env):
        return {b: EXP for b in binder_idents}


class VppiElaborator(VpccsElaborator):
    def binder_sorts(self, spattern, binder_idents, subject_sort, env):
        # a binder here could receive a value or a channel; make it explicit
        raise ElaborationError(
            "binder sort is ambiguous here; annotate as (\\x:exp) or (\\x:chan)")


def _common(**overrides) -> InstanceDefinition:
    base = dict(
        name="vpccs",
        sorts=(CHAN, EXP, VALUE),
        restrictable=frozenset((CHAN,)),
        can_receive=frozenset(((CHAN, EXP), (CHAN, VALUE))),
        can_send=frozenset(((CHAN, EXP), (CHAN, VALUE))),
        can_subst_by=frozenset(((EXP, VALUE),)),
        unit_assertion=UNIT,
        compose=lambda a, b: UNIT,
        entails=_entails_top,
        channel_eq_condition=_chan_eq,
        sort_of=vpccs_sort,
        substitute_term=vpccs_substitute,
        match=vpccs_match,
        pattern_binders=vpccs_binders,
        substitute_condition=vpccs_substitute,
        condition_enumerator=_conditions,
        assertion_enumerator=lambda: (UNIT,),
        term_generator=_term_gen,
        pattern_generator=lambda rng, names: rng.choice(
            sorted((n for n in names if isinstance(n, Name)), key=lambda n: n.key)),
        condition_generator=_cond_gen,
        assertion_generator=lambda rng, names: UNIT,
        message_generator=_messages,
        elaborate=VpccsElaborator(),
        notes={"about": "value-passing CCS: channels carry evaluated data, not channels"},
    )
    base.update(overrides)
    return InstanceDefinition(**base)


def vpccs_instance() -> InstanceDefinition:
    return _common()


def vppi_instance() -> InstanceDefinition:
    return _common(
        name="vppi",
        can_receive=frozenset(((CHAN, EXP), (CHAN, VALUE), (CHAN, CHAN))),
        can_send=frozenset(((CHAN, EXP), (CHAN, VALUE), (CHAN, CHAN))),
        can_subst_by=frozenset(((EXP, VALUE), (CHAN, CHAN))),
        match=vppi_match,
        elaborate=VppiElaborator(),
        notes={"about": "value-passing pi: as vpccs but channels also pass channels"},
    )
