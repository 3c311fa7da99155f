"""Sorted names, swapping, support and alpha-conversion.

Everything the workbench manipulates (terms, conditions, assertions,
patterns, agents, actions) is a nominal value: a finitely supported object
built from sorted names.  This module supplies the name type itself plus the
generic operations the rest of the package relies on:

* ``sw(a, b, x)``      transpose two names everywhere in ``x``
* ``supp(x)``          the set of names occurring in ``x``
* ``fresh_name``       deterministic fresh-name choice (lowest unused index)
* ``alpha_canonical``  rename all binders to a fixed reserved sequence
* ``alpha_equal``      equality up to renaming of bound names

Values participate through a small protocol: anything with ``swap_names``
and ``support`` methods is nominal, tuples and frozensets are mapped
elementwise, and plain payloads (str, int, bool, None) are inert.  Classes
that bind names additionally implement ``_alpha_canon`` so the generic
canonicalizer can thread its renaming environment under binders.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping


@dataclass(frozen=True)
class Sort:
    """A sort identifier.  ``name_sort`` marks sorts that names inhabit."""

    id: str
    name_sort: bool = True

    def __repr__(self) -> str:
        return self.id


@dataclass(frozen=True)
class Name:
    """A sorted name.  Rendered as ``base`` when index is 0, else ``base<index>``."""

    base: str
    index: int
    sort: Sort

    @property
    def key(self):
        """Stable ordering key (names themselves are not ordered)."""
        return (self.base, self.index, self.sort.id)

    def __repr__(self) -> str:
        return self.base if self.index == 0 else f"{self.base}{self.index}"

    def swap_names(self, a: "Name", b: "Name") -> "Name":
        if self == a:
            return b
        if self == b:
            return a
        return self

    def support(self) -> frozenset:
        return frozenset((self,))


# Base for the reserved canonical binder names; the tokenizer never produces it,
# so canonical values cannot collide with anything parsed from source text.
CANON_BASE = "$"

NameSet = frozenset


class NominalValue:
    """Mixin for structured nominal values.

    Subclasses are expected to be frozen dataclasses whose fields are
    themselves nominal (or inert payloads); the default implementations walk
    the fields generically.
    """

    def swap_names(self, a: Name, b: Name):
        return _map_fields(self, lambda v: sw(a, b, v))

    def support(self) -> NameSet:
        out: frozenset = frozenset()
        for f in dataclasses.fields(self):
            out |= supp(getattr(self, f.name))
        return out


def _map_fields(x, fn):
    return type(x)(**{f.name: fn(getattr(x, f.name)) for f in dataclasses.fields(x)})


def sw(a: Name, b: Name, x):
    """Apply the transposition (a b) to an arbitrary nominal value."""
    if a == b:
        return x
    if isinstance(x, Name):
        return x.swap_names(a, b)
    if isinstance(x, tuple):
        return tuple(sw(a, b, i) for i in x)
    if isinstance(x, frozenset):
        return frozenset(sw(a, b, i) for i in x)
    if x is None or isinstance(x, (str, int, bool)):
        return x
    return x.swap_names(a, b)


def swap_many(pairs: Iterable[tuple], x):
    for a, b in pairs:
        x = sw(a, b, x)
    return x


def supp(x) -> NameSet:
    """All names occurring in ``x`` (free for binder-less values)."""
    if isinstance(x, Name):
        return frozenset((x,))
    if isinstance(x, (tuple, frozenset)):
        out: frozenset = frozenset()
        for i in x:
            out |= supp(i)
        return out
    if x is None or isinstance(x, (str, int, bool)):
        return frozenset()
    return x.support()


def is_fresh(names, x) -> bool:
    """True when none of ``names`` occur in ``x``."""
    if isinstance(names, Name):
        names = (names,)
    return not (frozenset(names) & supp(x))


@dataclass(frozen=True)
class Permutation:
    """A finite name permutation, kept as a composition of transpositions.

    ``transpositions`` apply left to right: the first pair is swapped first.
    """

    transpositions: tuple = ()

    @staticmethod
    def from_mapping(mapping: Mapping[Name, Name]) -> "Permutation":
        """Build a permutation from an explicit bijective mapping."""
        if set(mapping) != set(mapping.values()):
            raise ValueError("mapping is not a permutation of its domain")
        swaps = []
        seen = set()
        for start in sorted(mapping, key=lambda n: n.key):
            if start in seen or mapping[start] == start:
                seen.add(start)
                continue
            cycle = [start]
            seen.add(start)
            n = mapping[start]
            while n != start:
                cycle.append(n)
                seen.add(n)
                n = mapping[n]
            # cycle (a1 .. ak) realizes a1->a2, ..., ak->a1 when the
            # transpositions (a_{k-1} a_k) ... (a1 a2) apply left to right
            for i in range(len(cycle) - 2, -1, -1):
                swaps.append((cycle[i], cycle[i + 1]))
        return Permutation(tuple(swaps))

    def of(self, x):
        return swap_many(self.transpositions, x)

    def inverse(self) -> "Permutation":
        return Permutation(tuple(reversed(self.transpositions)))

    def compose(self, other: "Permutation") -> "Permutation":
        """The permutation applying ``other`` first, then ``self``."""
        return Permutation(other.transpositions + self.transpositions)

    def __call__(self, x):
        return self.of(x)


def avoid_set(avoid) -> NameSet:
    """Normalize a value, a name, or a collection of values into a name set."""
    if isinstance(avoid, (list, tuple, set, frozenset)):
        return supp(tuple(avoid))
    return supp(avoid)


def fresh_name(sort: Sort, avoid, base: str = "a") -> Name:
    """Lowest-index name of ``sort`` with ``base`` not occurring in ``avoid``."""
    taken = {n.index for n in avoid_set(avoid) if n.base == base and n.sort == sort}
    i = 0
    while i in taken:
        i += 1
    return Name(base, i, sort)


def fresh_names(sorts, avoid, base: str = "a") -> tuple:
    """A tuple of distinct fresh names, one per sort in ``sorts``."""
    avoid = set(avoid_set(avoid))
    out = []
    for s in sorts:
        n = fresh_name(s, frozenset(avoid), base)
        out.append(n)
        avoid.add(n)
    return tuple(out)


class _CanonFresh:
    """Dispenser of reserved canonical binder names, one per traversal order."""

    def __init__(self) -> None:
        self.count = 0

    def __call__(self, sort: Sort) -> Name:
        n = Name(CANON_BASE, self.count, sort)
        self.count += 1
        return n


def alpha_canonical(x, ren: Mapping[Name, Name] | None = None, fresh: Callable | None = None):
    """Rename every binder in ``x`` to the reserved sequence $0, $1, ...

    Free names are left alone.  Two values are alpha-equivalent exactly when
    their canonical forms are structurally equal, so the result doubles as a
    hashable key for alpha-classes.
    """
    if ren is None:
        ren = {}
    if fresh is None:
        fresh = _CanonFresh()
    if isinstance(x, Name):
        return ren.get(x, x)
    if isinstance(x, tuple):
        return tuple(alpha_canonical(i, ren, fresh) for i in x)
    if isinstance(x, frozenset):
        return frozenset(alpha_canonical(i, ren, fresh) for i in x)
    if x is None or isinstance(x, (str, int, bool)):
        return x
    hook = getattr(x, "_alpha_canon", None)
    if hook is not None:
        return hook(ren, fresh)
    if dataclasses.is_dataclass(x):
        return _map_fields(x, lambda v: alpha_canonical(v, ren, fresh))
    raise TypeError(f"not a nominal value: {x!r}")


def alpha_equal(x, y) -> bool:
    """Equality modulo renaming of bound names."""
    if x is y:
        return True
    return alpha_canonical(x) == alpha_canonical(y)


def canon_binders(binders: tuple, body_parts: tuple, ren: Mapping[Name, Name], fresh: Callable):
    """Helper for ``_alpha_canon`` hooks: extend ``ren`` across ``binders``.

    Returns the canonical binder tuple and the extended renaming to use on the
    parts of the value lying in the binders' scope.
    """
    inner = dict(ren)
    new = []
    for b in binders:
        nb = fresh(b.sort)
        inner[b] = nb
        new.append(nb)
    return tuple(new), inner
