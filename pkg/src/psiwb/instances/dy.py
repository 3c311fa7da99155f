"""Message algebra of the asymmetric-crypto calculus, with Dolev-Yao
derivability and the non-homomorphic substitution.

Terms are names, ``()``, pairs, ``eKey(M)``/``dKey(M)`` key halves,
``enc(M,K)`` ciphertexts, and ``encinv(M,N)`` (encryption with the inverse
of decryption key N, a pattern-only construct).  ``message_sort`` classifies
a term as implementable, pattern-only, or ill-formed; substitution turns an
``encinv`` into a real ciphertext the moment its key argument becomes a
``dKey``, which is how received keys retroactively make patterns concrete.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..instance import Substitution
from ..names import Name, Sort, supp
from ..terms import Func, Pair, UnitTerm

IMPL = Sort("impl")
PAT = Sort("pat", name_sort=False)
ILL = Sort("bot", name_sort=False)

_UNARY = ("eKey", "dKey")
_BINARY = ("enc", "encinv")


def is_message(term) -> bool:
    if isinstance(term, (Name, UnitTerm)):
        return True
    if isinstance(term, Pair):
        return is_message(term.left) and is_message(term.right)
    if isinstance(term, Func):
        if term.symbol in _UNARY:
            return len(term.args) == 1 and is_message(term.args[0])
        if term.symbol in _BINARY:
            return len(term.args) == 2 and all(map(is_message, term.args))
    return False


def message_sort(term) -> Sort:
    """impl if encinv-free, ill-formed if some encinv has a dKey key,
    pattern-only otherwise."""
    if isinstance(term, Name):
        return term.sort
    ill = False
    pat = False

    def walk(t):
        nonlocal ill, pat
        if isinstance(t, Pair):
            walk(t.left)
            walk(t.right)
        elif isinstance(t, Func):
            if t.symbol == "encinv":
                pat = True
                key = t.args[1]
                if isinstance(key, Func) and key.symbol == "dKey":
                    ill = True
            for a in t.args:
                walk(a)

    walk(term)
    if ill:
        return ILL
    return PAT if pat else IMPL


def pmspi_substitute(term, sub: Substitution):
    """Homomorphic except that ``encinv(M1,M2)`` becomes
    ``enc(M1, eKey(N))`` whenever the substituted key is ``dKey(N)``."""
    if isinstance(term, Name):
        return sub.get(term, term)
    if isinstance(term, UnitTerm):
        return term
    if isinstance(term, Pair):
        return Pair(pmspi_substitute(term.left, sub),
                    pmspi_substitute(term.right, sub))
    if isinstance(term, Func):
        args = tuple(pmspi_substitute(a, sub) for a in term.args)
        if term.symbol == "encinv":
            key = args[1]
            if isinstance(key, Func) and key.symbol == "dKey":
                return Func("enc", (args[0], Func("eKey", (key.args[0],))))
        return Func(term.symbol, args)
    raise TypeError(f"not a message term: {term!r}")


# -- derivability -------------------------------------------------------------


@dataclass(frozen=True)
class KnowledgeSet:
    """A finite set of messages an observer holds."""

    terms: frozenset

    def __post_init__(self):
        for t in self.terms:
            if not is_message(t):
                raise ValueError(f"not a message term: {t!r}")
            if message_sort(t) == ILL:
                raise ValueError(f"ill-formed message in knowledge: {t!r}")

    @staticmethod
    def of(*terms) -> "KnowledgeSet":
        return KnowledgeSet(frozenset(terms))

    def __contains__(self, term) -> bool:
        return term in self.terms

    def __iter__(self):
        return iter(sorted(self.terms, key=repr))

    def __repr__(self) -> str:
        return "{" + ", ".join(map(repr, self)) + "}"


def synthesizable(known: frozenset, goal) -> bool:
    """Build ``goal`` from ``known`` upward: literal members, unit, pairing,
    key halves, encryption.  No analysis; run on a saturated set."""
    if goal in known:
        return True
    if isinstance(goal, UnitTerm):
        return True
    if isinstance(goal, Pair):
        return synthesizable(known, goal.left) and synthesizable(known, goal.right)
    if isinstance(goal, Func):
        if goal.symbol in _UNARY:
            return synthesizable(known, goal.args[0])
        if goal.symbol == "enc":
            return all(synthesizable(known, a) for a in goal.args)
    return False  # names not known; encinv is never synthesizable


def saturate(terms) -> frozenset:
    """Close knowledge under analysis: split pairs, open ciphertexts whose
    key seed is derivable, take payloads of encinv whose key is derivable.
    Analyzed terms stay in the set (safe by weakening)."""
    known = set(terms)
    changed = True
    while changed:
        changed = False
        for t in list(known):
            new = ()
            if isinstance(t, Pair):
                new = (t.left, t.right)
            elif isinstance(t, Func) and t.symbol == "enc":
                key = t.args[1]
                if (isinstance(key, Func) and key.symbol == "eKey"
                        and synthesizable(frozenset(known), key.args[0])):
                    new = (t.args[0],)
            elif isinstance(t, Func) and t.symbol == "encinv":
                if synthesizable(frozenset(known), t.args[1]):
                    new = (t.args[0],)
            for n in new:
                if n not in known:
                    known.add(n)
                    changed = True
    return frozenset(known)


def dy_derivable(knowledge, goals) -> bool:
    """Whether every goal is deducible from the knowledge by the message
    rules: saturation by analysis, then pure synthesis per goal."""
    if isinstance(knowledge, KnowledgeSet):
        knowledge = knowledge.terms
    known = saturate(knowledge)
    return all(synthesizable(known, g) for g in goals)


def pmspi_binders(pattern) -> tuple:
    """Name sets bindable in a pattern: S is allowed when the names outside
    S, together with the pattern itself, suffice to derive all of S."""
    names = sorted(supp(pattern), key=lambda n: n.key)
    if len(names) > 12:
        from ..instance import UnsupportedCheck
        raise UnsupportedCheck(
            f"pattern has {len(names)} names; binder enumeration is capped at 12")
    from itertools import combinations
    out = []
    for r in range(len(names) + 1):
        for S in combinations(names, r):
            rest = [n for n in names if n not in S]
            if dy_derivable(rest + [pattern], S):
                out.append(frozenset(S))
    return tuple(out)
