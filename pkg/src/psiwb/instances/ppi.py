"""Tuple-communication calculus families.

``ppi`` is polyadic pi: channels are names, data are flat name tuples, and
an input pattern is a tuple of distinct names binding every position.
``linda`` relaxes patterns to arbitrary name tuples binding any subset;
free positions must then agree literally, which gives tuple-space matching.
``sortedppi`` refines ppi with user-chosen channel sorts so that matching
in a well-formed agent never fails.  ``pspi`` is polyadic synchronisation
pi: subjects are name tuples and the payload is a single name.
"""

from __future__ import annotations

from itertools import combinations

from ..instance import InstanceDefinition
from ..names import Name, Sort
from ..surface import ElaborationError, Elaborator, SBin, SId, SInt, SParen, STuple
from ..terms import BOT, TOP, NameEq, TupleTerm, UNIT

CHAN = Sort("chan")
TUP = Sort("tup", name_sort=False)


# -- trivial assertion monoid over name equations ----------------------------


def _compose(a, b):
    return UNIT


def _entails_eq(psi, cond) -> bool:
    if cond == TOP:
        return True
    return isinstance(cond, NameEq) and cond.left == cond.right


def _entails_top(psi, cond) -> bool:
    return cond == TOP


def _eq_condition(m, k):
    if isinstance(m, Name) and isinstance(k, Name):
        return NameEq(m, k)
    return BOT


def _ident_condition(m, k):
    return TOP if m == k else BOT


def _eq_conditions(names):
    pool = sorted((n for n in names if isinstance(n, Name)), key=lambda n: n.key)
    eqs = [NameEq(a, b) for a in pool for b in pool]
    return (TOP, BOT, *eqs)


def _flat_subst(value, sub):
    if isinstance(value, Name):
        return sub.get(value, value)
    if isinstance(value, TupleTerm):
        return TupleTerm(tuple(_flat_subst(i, sub) for i in value.items))
    return value


def _cond_subst(cond, sub):
    if isinstance(cond, NameEq):
        left = sub.get(cond.left, cond.left)
        right = sub.get(cond.right, cond.right)
        if isinstance(left, Name) and isinstance(right, Name):
            return NameEq(left, right)
    return cond


def _flat_sort(x) -> Sort:
    if isinstance(x, Name):
        return x.sort
    if isinstance(x, TupleTerm):
        return TUP
    raise TypeError(f"not a term of this calculus: {x!r}")


# -- ppi ---------------------------------------------------------------------


def ppi_binders(pattern):
    """A tuple of distinct names binds exactly all of its names."""
    if (isinstance(pattern, TupleTerm)
            and all(isinstance(i, Name) for i in pattern.items)
            and len(set(pattern.items)) == len(pattern.items)):
        return (frozenset(pattern.items),)
    return ()


def ppi_match(obj, binders, pattern):
    if not (isinstance(obj, TupleTerm) and isinstance(pattern, TupleTerm)):
        return ()
    if len(obj.items) != len(pattern.items):
        return ()
    if not all(isinstance(i, Name) for i in obj.items):
        return ()
    if set(binders) != set(pattern.items):
        return ()
    pos = {name: i for i, name in enumerate(pattern.items)}
    return (tuple(obj.items[pos[x]] for x in binders),)


def _chan_pool(names):
    pool = [n for n in names if isinstance(n, Name) and n.sort == CHAN]
    return sorted(pool, key=lambda n: n.key)


def _ppi_term_gen(rng, names, depth=2):
    pool = _chan_pool(names)
    if not pool:
        return TupleTerm(())
    if rng.random() < 0.4:
        return rng.choice(pool)
    return TupleTerm(tuple(rng.choice(pool) for _ in range(rng.randrange(3))))


def _ppi_pattern_gen(rng, names):
    pool = _chan_pool(names)
    k = rng.randrange(1, min(3, len(pool)) + 1)
    return TupleTerm(tuple(rng.sample(pool, k)))


def _linda_pattern_gen(rng, names):
    pool = _chan_pool(names)
    return TupleTerm(tuple(rng.choice(pool) for _ in range(rng.randrange(1, 4))))


def _eq_condition_gen(rng, names):
    pool = _chan_pool(names)
    if not pool or rng.random() < 0.25:
        return TOP
    return NameEq(rng.choice(pool), rng.choice(pool))


def _ppi_messages(sort, names):
    pool = sorted((n for n in names if isinstance(n, Name)), key=lambda n: n.key)
    if sort == TUP:
        chans = [n for n in pool if n.sort == CHAN][:3]
        out = [TupleTerm(())]
        out += [TupleTerm((a,)) for a in chans]
        out += [TupleTerm((a, b)) for a in chans[:2] for b in chans[:2]]
        return tuple(out)
    return tuple(n for n in pool if n.sort == sort)


class TupleElaborator(Elaborator):
    """Surface terms are identifiers and ``<a,b,...>`` tuples of names."""

    binder_sort = CHAN

    def term(self, s, env):
        if isinstance(s, SId):
            return self.lookup(s.ident, env)
        if isinstance(s, STuple):
            return TupleTerm(tuple(self.term(i, env) for i in s.items))
        if isinstance(s, SParen) and len(s.items) == 1:
            return self.term(s.items[0], env)
        raise ElaborationError(f"not a term of this calculus: {s!r}")

    def condition(self, s, env):
        if isinstance(s, SBin) and s.op == "=":
            left, right = self.term(s.left, env), self.term(s.right, env)
            if isinstance(left, Name) and isinstance(right, Name):
                return NameEq(left, right)
            raise ElaborationError("equality conditions compare names")
        if isinstance(s, SId) and s.ident not in env:
            if s.ident == "T":
                return TOP
            if s.ident == "F":
                return BOT
        raise ElaborationError(f"not a condition: {s!r}")

    def assertion(self, s, env):
        if isinstance(s, SInt) and s.value == 1:
            return UNIT
        raise ElaborationError(f"the only assertion here is 1, got {s!r}")

    def binder_sorts(self, spattern, binder_idents, subject_sort, env):
        return {b: self.binder_sort for b in binder_idents}


def ppi_instance() -> InstanceDefinition:
    return InstanceDefinition(
        name="ppi",
        sorts=(CHAN, TUP),
        restrictable=frozenset((CHAN,)),
        can_receive=frozenset(((CHAN, TUP),)),
        can_send=frozenset(((CHAN, TUP),)),
        can_subst_by=frozenset(((CHAN, CHAN),)),
        unit_assertion=UNIT,
        compose=_compose,
        entails=_entails_eq,
        channel_eq_condition=_eq_condition,
        sort_of=_flat_sort,
        substitute_term=_flat_subst,
        match=ppi_match,
        pattern_binders=ppi_binders,
        substitute_condition=_cond_subst,
        condition_enumerator=_eq_conditions,
        assertion_enumerator=lambda: (UNIT,),
        term_generator=_ppi_term_gen,
        pattern_generator=_ppi_pattern_gen,
        condition_generator=_eq_condition_gen,
        assertion_generator=lambda rng, names: UNIT,
        message_generator=_ppi_messages,
        elaborate=TupleElaborator(),
        notes={"about": "polyadic pi: name-tuple data, all-position patterns"},
    )


# -- linda -------------------------------------------------------------------


def linda_binders(pattern):
    """Any subset of the names occurring in the tuple may be bound."""
    if not (isinstance(pattern, TupleTerm)
            and all(isinstance(i, Name) for i in pattern.items)):
        return ()
    names = sorted(set(pattern.items), key=lambda n: n.key)
    out = []
    for r in range(len(names) + 1):
        out.extend(frozenset(c) for c in combinations(names, r))
    return tuple(out)


def linda_match(obj, binders, pattern):
    if not (isinstance(obj, TupleTerm) and isinstance(pattern, TupleTerm)):
        return ()
    if len(obj.items) != len(pattern.items):
        return ()
    bound: dict = {}
    bset = set(binders)
    for got, want in zip(obj.items, pattern.items):
        if want in bset:
            if bound.setdefault(want, got) != got:
                return ()
        elif got != want:
            return ()
    if set(bound) != bset:
        return ()
    if not all(isinstance(v, Name) for v in bound.values()):
        return ()
    return (tuple(bound[x] for x in binders),)


def linda_instance() -> InstanceDefinition:
    inst = ppi_instance()
    inst.name = "linda"
    inst.match = linda_match
    inst.pattern_binders = linda_binders
    inst.pattern_generator = _linda_pattern_gen
    inst.notes = {"about": "tuple-space matching: partial, possibly nonlinear patterns"}
    return inst


# -- sortedppi ---------------------------------------------------------------


def tuple_sort(sorts) -> Sort:
    return Sort("<" + ",".join(s.id for s in sorts) + ">", name_sort=False)


def _deep_sort(x) -> Sort:
    if isinstance(x, Name):
        return x.sort
    if isinstance(x, TupleTerm):
        return tuple_sort(tuple(_deep_sort(i) for i in x.items))
    raise TypeError(f"not a term of this calculus: {x!r}")


def _sortedppi_match(obj, binders, pattern):
    if not (isinstance(obj, TupleTerm) and isinstance(pattern, TupleTerm)):
        return ()
    if _deep_sort(obj) != _deep_sort(pattern):
        return ()
    return ppi_match(obj, binders, pattern)


class SortedTupleElaborator(TupleElaborator):
    def __init__(self, obmap: dict):
        self.obmap = obmap

    def binder_sorts(self, spattern, binder_idents, subject_sort, env):
        seq = self.obmap.get(subject_sort)
        if not isinstance(spattern, STuple) or seq is None:
            raise ElaborationError(
                f"cannot infer binder sorts under subject sort {subject_sort.id}")
        if len(seq) != len(spattern.items):
            raise ElaborationError(
                f"subject sort {subject_sort.id} carries {len(seq)}-tuples, "
                f"pattern has {len(spattern.items)} positions")
        out = {}
        for item, isort in zip(spattern.items, seq):
            if isinstance(item, SId) and item.ident in binder_idents:
                out[item.ident] = isort
        return out


def sortedppi_instance(ob) -> InstanceDefinition:
    """Polyadic pi with per-channel object sorts.

    ``ob`` maps channel-sort ids to the sequence of object-sort ids carried
    on channels of that sort; sorts outside the map cannot communicate.
    """
    ids = set(ob) | {sid for seq in ob.values() for sid in seq}
    if not ids:
        raise ValueError("sortedppi needs at least one sort")
    user = {sid: Sort(sid) for sid in sorted(ids)}
    obmap = {user[sid]: tuple(user[t] for t in seq) for sid, seq in ob.items()}
    tsorts = sorted({tuple_sort(seq) for seq in obmap.values()}, key=lambda s: s.id)
    comm = frozenset((s, tuple_sort(seq)) for s, seq in obmap.items())
    usorts = tuple(user[sid] for sid in sorted(user))

    def seq_key(seq):
        return tuple(s.id for s in seq)

    def messages(sort, names):
        pool = sorted((n for n in names if isinstance(n, Name)), key=lambda n: n.key)
        for seq in sorted(obmap.values(), key=seq_key):
            if tuple_sort(seq) == sort:
                slots = [[n for n in pool if n.sort == s][:2] for s in seq]
                out = [()]
                for slot in slots:
                    out = [prev + (n,) for prev in out for n in slot]
                return tuple(TupleTerm(items) for items in out)
        return tuple(n for n in pool if n.sort == sort)

    def term_gen(rng, names, depth=2):
        pool = [n for n in names if isinstance(n, Name)]
        if not obmap or rng.random() < 0.4:
            return rng.choice(pool)
        seq = rng.choice(sorted(obmap.values(), key=seq_key))
        picks = []
        for s in seq:
            cands = [n for n in pool if n.sort == s]
            if not cands:
                return rng.choice(pool)
            picks.append(rng.choice(cands))
        return TupleTerm(tuple(picks))

    def pattern_gen(rng, names):
        t = term_gen(rng, names)
        if isinstance(t, TupleTerm) and ppi_binders(t):
            return t
        pool = [n for n in names if isinstance(n, Name)]
        return TupleTerm((rng.choice(pool),))

    return InstanceDefinition(
        name="sortedppi",
        sorts=usorts + tuple(tsorts),
        restrictable=frozenset(usorts),
        can_receive=comm,
        can_send=comm,
        can_subst_by=frozenset((s, s) for s in usorts),
        unit_assertion=UNIT,
        compose=_compose,
        entails=_entails_eq,
        channel_eq_condition=_eq_condition,
        sort_of=_deep_sort,
        substitute_term=_flat_subst,
        match=_sortedppi_match,
        pattern_binders=ppi_binders,
        substitute_condition=_cond_subst,
        condition_enumerator=_eq_conditions,
        assertion_enumerator=lambda: (UNIT,),
        term_generator=term_gen,
        pattern_generator=pattern_gen,
        condition_generator=_eq_condition_gen,
        assertion_generator=lambda rng, names: UNIT,
        message_generator=messages,
        elaborate=SortedTupleElaborator(obmap),
        notes={"about": "polyadic pi with channel disciplines; matching never fails",
               "ob": {sid: tuple(seq) for sid, seq in ob.items()}},
    )


DEFAULT_SORTEDPPI_OB = {"chan": ("data", "data"), "data": ()}


# -- pspi ----------------------------------------------------------------------


def pspi_binders(pattern):
    if isinstance(pattern, Name):
        return (frozenset((pattern,)),)
    return ()


def pspi_match(obj, binders, pattern):
    if (isinstance(obj, Name) and isinstance(pattern, Name)
            and tuple(binders) == (pattern,)):
        return ((obj,),)
    return ()


def _pspi_term_gen(rng, names, depth=2):
    pool = _chan_pool(names)
    if rng.random() < 0.5:
        return rng.choice(pool)
    return TupleTerm(tuple(rng.choice(pool) for _ in range(rng.randrange(1, 3))))


def _pspi_messages(sort, names):
    pool = sorted((n for n in names if isinstance(n, Name)), key=lambda n: n.key)
    if sort == TUP:
        chans = [n for n in pool if n.sort == CHAN][:2]
        return tuple(TupleTerm((a, b)) for a in chans for b in chans)
    return tuple(n for n in pool if n.sort == sort)


class PspiElaborator(TupleElaborator):
    def condition(self, s, env):
        if isinstance(s, SId) and s.ident not in env:
            if s.ident == "T":
                return TOP
            if s.ident == "F":
                return BOT
        raise ElaborationError(f"conditions here are T and F, got {s!r}")


def pspi_instance() -> InstanceDefinition:
    return InstanceDefinition(
        name="pspi",
        sorts=(CHAN, TUP),
        restrictable=frozenset((CHAN,)),
        can_receive=frozenset(((TUP, CHAN),)),
        can_send=frozenset(((TUP, CHAN),)),
        can_subst_by=frozenset(((CHAN, CHAN),)),
        unit_assertion=UNIT,
        compose=_compose,
        entails=_entails_top,
        channel_eq_condition=_ident_condition,
        sort_of=_flat_sort,
        substitute_term=_flat_subst,
        match=pspi_match,
        pattern_binders=pspi_binders,
        substitute_condition=_cond_subst,
        condition_enumerator=lambda names: (TOP, BOT),
        assertion_enumerator=lambda: (UNIT,),
        term_generator=_pspi_term_gen,
        pattern_generator=lambda rng, names: rng.choice(_chan_pool(names)),
        condition_generator=lambda rng, names: TOP if rng.random() < 0.7 else BOT,
        assertion_generator=lambda rng, names: UNIT,
        message_generator=_pspi_messages,
        elaborate=PspiElaborator(),
        notes={"about": "polyadic synchronisation pi: tuple subjects, name payloads"},
    )
