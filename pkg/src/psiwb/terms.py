"""Concrete term, condition and assertion datatypes shared by the built-in
calculus instances.

These are plain frozen dataclasses over sorted names.  ``repr`` of every
value is its surface syntax, so rendering a value and re-parsing it under the
same instance round-trips; internal canonical keys reuse the same rendering.

Nothing here fixes a calculus: which of these shapes are legal terms,
patterns or conditions is decided by each instance definition.
"""

from __future__ import annotations

from dataclasses import dataclass

from .names import Name, NominalValue, canon_binders, supp


@dataclass(frozen=True)
class TupleTerm(NominalValue):
    """A polyadic data tuple ``<t1,...,tn>``."""

    items: tuple

    def __repr__(self) -> str:
        return "<" + ",".join(map(repr, self.items)) + ">"


@dataclass(frozen=True)
class Func(NominalValue):
    """Application of a signature symbol: ``f(t1,...,tn)``, or ``f`` if nullary."""

    symbol: str
    args: tuple = ()

    def __repr__(self) -> str:
        if not self.args:
            return self.symbol
        return self.symbol + "(" + ",".join(map(repr, self.args)) + ")"


@dataclass(frozen=True)
class UnitTerm(NominalValue):
    """The nullary data value ``()``."""

    def __repr__(self) -> str:
        return "()"


@dataclass(frozen=True)
class Pair(NominalValue):
    """A binary data pair ``(l,r)``."""

    left: object
    right: object

    def __repr__(self) -> str:
        return f"({self.left!r},{self.right!r})"


@dataclass(frozen=True)
class Lam(NominalValue):
    """Lambda abstraction; ``binder`` is bound in ``body``."""

    binder: Name
    body: object

    def support(self):
        return supp(self.body) - {self.binder}

    def _alpha_canon(self, ren, fresh):
        from .names import alpha_canonical
        (b,), inner = canon_binders((self.binder,), (self.body,), ren, fresh)
        return Lam(b, alpha_canonical(self.body, inner, fresh))

    def __repr__(self) -> str:
        return f"(\\{self.binder!r}. {self.body!r})"


@dataclass(frozen=True)
class App(NominalValue):
    """Application by juxtaposition: ``(fn arg)``."""

    fn: object
    arg: object

    def __repr__(self) -> str:
        return f"({self.fn!r} {self.arg!r})"


@dataclass(frozen=True)
class Choice(NominalValue):
    """Erratic choice between two terms: ``(l [] r)``."""

    left: object
    right: object

    def __repr__(self) -> str:
        return f"({self.left!r} [] {self.right!r})"


@dataclass(frozen=True)
class IntLit(NominalValue):
    value: int

    def __repr__(self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class BoolLit(NominalValue):
    value: bool

    def __repr__(self) -> str:
        return "T" if self.value else "F"


@dataclass(frozen=True)
class BinOp(NominalValue):
    """Arithmetic or comparison expression; ``op`` is ``+`` or ``>``."""

    op: str
    left: object
    right: object

    def __repr__(self) -> str:
        return f"({self.left!r}{self.op}{self.right!r})"


TOP = BoolLit(True)
BOT = BoolLit(False)


@dataclass(frozen=True)
class NameEq(NominalValue):
    """Name equation condition ``a=b``."""

    left: Name
    right: Name

    def __repr__(self) -> str:
        return f"{self.left!r}={self.right!r}"


@dataclass(frozen=True)
class Unit(NominalValue):
    """The unit assertion of a trivial assertion monoid."""

    def __repr__(self) -> str:
        return "1"


UNIT = Unit()


def replace_names(value, mapping):
    """Simultaneous name-to-term replacement on binder-free structure.

    Values containing binders (``Lam``) must be handled by their instance's
    own substitution; this helper walks tuples and plain nominal dataclasses.
    """
    if isinstance(value, Name):
        return mapping.get(value, value)
    if isinstance(value, tuple):
        return tuple(replace_names(v, mapping) for v in value)
    if isinstance(value, Lam):
        raise TypeError("replace_names does not thread binders; use the instance substitution")
    if isinstance(value, NominalValue):
        import dataclasses
        return type(value)(**{
            f.name: replace_names(getattr(value, f.name), mapping)
            for f in dataclasses.fields(value)
        })
    return value
