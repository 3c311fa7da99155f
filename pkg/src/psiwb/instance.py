"""Calculus instance definitions and the operations parametrized by them.

An instance supplies the data of one calculus: its sorts, the four sort
compatibility relations, the assertion monoid with entailment, channel
equivalence, substitution on each datatype, and pattern matching.  The
workbench engine (well-formedness, transitions, bisimulation) is written
against this interface only.

Executability extensions beyond the core parameters:

* ``channel_candidates(psi, M)`` replaces the unbounded search for subjects
  channel-equivalent to ``M`` with a finite, instance-chosen set.
* ``condition_enumerator(names)`` yields the finitely many conditions
  relevant to a name support, enabling assertion equivalence checks.
* ``assertion_enumerator()`` yields a finite assertion universe when one
  exists, enabling monoid-law validation.
* generator hooks produce random terms/patterns/conditions for law checking
  and corpus tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from .names import Name, NameSet, NominalValue, Sort, supp


class UnsupportedCheck(Exception):
    """Raised when an operation needs an enumerator the instance lacks."""


@dataclass(frozen=True)
class Substitution(NominalValue):
    """A finite simultaneous map from names to terms.

    ``pairs`` is kept sorted by name for stable equality.  Use
    ``Substitution.make`` to have the domain/range checked against an
    instance's substitutability relation.
    """

    pairs: tuple = ()

    @staticmethod
    def of(*pairs) -> "Substitution":
        items = tuple(sorted(pairs, key=lambda p: p[0].key))
        names = [n for n, _ in items]
        if len(set(names)) != len(names):
            raise ValueError("substitution domain must be distinct names")
        return Substitution(items)

    @staticmethod
    def make(inst: "InstanceDefinition", pairs) -> "Substitution":
        sub = Substitution.of(*pairs)
        for n, t in sub.pairs:
            if (n.sort, inst.sort_of(t)) not in inst.can_subst_by:
                raise ValueError(
                    f"ill-sorted substitution: {n!r}:{n.sort} := {t!r}:{inst.sort_of(t)}")
        return sub

    def domain(self) -> tuple:
        return tuple(n for n, _ in self.pairs)

    def as_dict(self) -> dict:
        return dict(self.pairs)

    def get(self, name: Name, default=None):
        for n, t in self.pairs:
            if n == name:
                return t
        return default

    def is_empty(self) -> bool:
        return not self.pairs

    def __repr__(self) -> str:
        inner = ",".join(f"{t!r}/{n!r}" for n, t in self.pairs)
        return "[" + inner + "]"


@dataclass
class InstanceDefinition:
    """All parameters of one sorted psi-calculus, bundled.

    The callable fields take plain values (terms, conditions, assertions,
    patterns as the instance defines them) and must be equivariant; the
    validator samples that.
    """

    name: str
    sorts: tuple
    restrictable: frozenset
    can_receive: frozenset      # (subject sort, pattern sort) pairs
    can_send: frozenset         # (subject sort, object sort) pairs
    can_subst_by: frozenset     # (name sort, term sort) pairs
    unit_assertion: object
    compose: Callable
    entails: Callable
    channel_eq_condition: Callable
    sort_of: Callable
    substitute_term: Callable
    match: Callable
    pattern_binders: Callable
    substitute_pattern: Optional[Callable] = None
    substitute_condition: Optional[Callable] = None
    substitute_assertion: Optional[Callable] = None
    channel_candidates: Optional[Callable] = None
    condition_enumerator: Optional[Callable] = None
    assertion_enumerator: Optional[Callable] = None
    term_generator: Optional[Callable] = None
    pattern_generator: Optional[Callable] = None
    condition_generator: Optional[Callable] = None
    assertion_generator: Optional[Callable] = None
    message_generator: Optional[Callable] = None
    elaborate: Optional[object] = None     # surface-syntax elaborator, set by parser glue
    notes: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.substitute_pattern is None:
            self.substitute_pattern = self.substitute_term
        if self.substitute_condition is None:
            self.substitute_condition = _identity_subst
        if self.substitute_assertion is None:
            self.substitute_assertion = _identity_subst

    # -- sort machinery ----------------------------------------------------

    def name_sorts(self) -> frozenset:
        return frozenset(s for s in self.sorts if s.name_sort)

    def sort_by_id(self, sid: str) -> Sort:
        for s in self.sorts:
            if s.id == sid:
                return s
        raise KeyError(f"instance {self.name} has no sort {sid!r}")

    def receivable(self, subject_sort: Sort, pattern_sort: Sort) -> bool:
        return (subject_sort, pattern_sort) in self.can_receive

    def sendable(self, subject_sort: Sort, object_sort: Sort) -> bool:
        return (subject_sort, object_sort) in self.can_send

    def substitutable(self, name_sort: Sort, term_sort: Sort) -> bool:
        return (name_sort, term_sort) in self.can_subst_by

    def __repr__(self) -> str:
        return f"<instance {self.name}>"


def _identity_subst(value, sub: Substitution):
    return value


# -- operations over an instance -------------------------------------------


def usage_preorder_term(inst: InstanceDefinition, s1: Sort, s2: Sort) -> bool:
    """s1 can be used as a term wherever s2 can (receive, send, be sent)."""
    for t in inst.sorts:
        if inst.receivable(s2, t) and not inst.receivable(s1, t):
            return False
        if inst.sendable(s2, t) and not inst.sendable(s1, t):
            return False
        if inst.sendable(t, s2) and not inst.sendable(t, s1):
            return False
    return True


def usage_preorder_pattern(inst: InstanceDefinition, s1: Sort, s2: Sort) -> bool:
    """s1 can be used as a pattern wherever s2 can (be received)."""
    for t in inst.sorts:
        if inst.receivable(t, s2) and not inst.receivable(t, s1):
            return False
    return True


def compose_assertions(inst: InstanceDefinition, *assertions):
    acc = inst.unit_assertion
    for a in assertions:
        acc = inst.compose(acc, a)
    return acc


def substitute(inst: InstanceDefinition, value, sub: Substitution, kind: str = "term"):
    fn = {
        "term": inst.substitute_term,
        "pattern": inst.substitute_pattern,
        "condition": inst.substitute_condition,
        "assertion": inst.substitute_assertion,
    }[kind]
    return fn(value, sub)


def channel_candidates(inst: InstanceDefinition, psi, term) -> tuple:
    """Finite set of subjects channel-equivalent to ``term`` under ``psi``."""
    if inst.channel_candidates is not None:
        return tuple(inst.channel_candidates(psi, term))
    if inst.entails(psi, inst.channel_eq_condition(term, term)):
        return (term,)
    return ()


def match_pattern(inst: InstanceDefinition, obj, binders: tuple, pattern) -> tuple:
    """All tuples of terms the object can bind to ``pattern`` at ``binders``.

    The binder tuple must be distinct names forming one of the pattern's
    allowed binder sets; anything else is an error in the caller, not an
    empty match.
    """
    if len(set(binders)) != len(binders):
        raise ValueError(f"binders must be distinct: {binders!r}")
    allowed = {frozenset(v) for v in inst.pattern_binders(pattern)}
    if frozenset(binders) not in allowed:
        raise ValueError(
            f"{tuple(binders)!r} is not an allowed binder set of pattern {pattern!r}")
    return tuple(inst.match(obj, tuple(binders), pattern))


def assertion_equivalent(inst: InstanceDefinition, a1, a2, names: NameSet = frozenset()) -> bool:
    """Same conditions entailed, over the instance's condition universe."""
    if inst.condition_enumerator is None:
        raise UnsupportedCheck(
            f"instance {inst.name} does not enumerate conditions; "
            "assertion equivalence is undecidable here")
    scope = frozenset(names) | supp(a1) | supp(a2)
    for cond in inst.condition_enumerator(scope):
        if inst.entails(a1, cond) != inst.entails(a2, cond):
            return False
    return True


def subst_from_lists(names: Iterable[Name], terms: Iterable) -> Substitution:
    names = tuple(names)
    terms = tuple(terms)
    if len(names) != len(terms):
        raise ValueError("substitution lists must have equal length")
    return Substitution.of(*zip(names, terms)) if names else Substitution()
