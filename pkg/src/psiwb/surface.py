"""Tokenizer and surface-term grammar shared by every instance sublanguage.

The process parser delegates terms, patterns, conditions and assertions to
this grammar and hands the resulting surface trees to the instance's
elaborator, which turns them into actual instance values (or rejects
constructs outside its language).

Surface grammar, loosest to tightest:

    choice :=  cmp ('[]' cmp)*
    cmp    :=  sum (('>' | '=') sum)?      -- only where cmp_ok
    sum    :=  app ('+' app)*
    app    :=  atom atom*                  -- juxtaposition application
    atom   :=  ident | ident '(' args ')' | int
            |  '<' args '>'                -- tuple
            |  '(' args ')'                -- unit / group / pair
            |  '\\' ident '.' choice       -- lambda

Comparison is disabled where a bare ``>`` would close the surrounding
delimiter (output objects, tuple items); parenthesize to compare there.
Subjects and patterns sit in undelimited positions, so they are restricted
to single atoms; wrap anything larger in parentheses.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .names import Name, Sort


class ParseError(Exception):
    def __init__(self, message: str, pos: int = -1):
        super().__init__(message + (f" (at offset {pos})" if pos >= 0 else ""))
        self.pos = pos


@dataclass(frozen=True)
class Tok:
    kind: str
    text: str
    pos: int


_TWO_CHAR = ("(|", "|)", "[]")
_ONE_CHAR = "()<>,.'\\|!:=+>"
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_NAME_SHAPE = re.compile(r"([A-Za-z_]+?)([0-9]*)$")


def tokenize(text: str) -> list:
    out = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c in " \t\r\n":
            i += 1
            continue
        if text.startswith("--", i):
            j = text.find("\n", i)
            i = n if j < 0 else j + 1
            continue
        if text[i:i + 2] in _TWO_CHAR:
            out.append(Tok(text[i:i + 2], text[i:i + 2], i))
            i += 2
            continue
        if c in _ONE_CHAR:
            out.append(Tok(c, c, i))
            i += 1
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            out.append(Tok("INT", text[i:j], i))
            i = j
            continue
        m = _IDENT.match(text, i)
        if m:
            out.append(Tok("IDENT", m.group(0), i))
            i = m.end()
            continue
        raise ParseError(f"unexpected character {c!r}", i)
    out.append(Tok("EOF", "", n))
    return out


def ident_to_name(ident: str, sort: Sort, pos: int = -1) -> Name:
    """Split a trailing decimal index off an identifier: ``a2`` -> Name(a,2)."""
    m = _NAME_SHAPE.match(ident)
    if not m:
        raise ParseError(f"{ident!r} is not a valid name", pos)
    base, digits = m.group(1), m.group(2)
    return Name(base, int(digits) if digits else 0, sort)


# -- surface trees ----------------------------------------------------------


@dataclass(frozen=True)
class SId:
    ident: str


@dataclass(frozen=True)
class SInt:
    value: int


@dataclass(frozen=True)
class SCall:
    symbol: str
    args: tuple


@dataclass(frozen=True)
class STuple:
    items: tuple


@dataclass(frozen=True)
class SParen:
    items: tuple  # () unit, (t) group, (t1,t2,...) pair chain


@dataclass(frozen=True)
class SLam:
    var: str
    body: object


@dataclass(frozen=True)
class SApp:
    fn: object
    arg: object


@dataclass(frozen=True)
class SChoice:
    left: object
    right: object


@dataclass(frozen=True)
class SBin:
    op: str
    left: object
    right: object


_ATOM_START = ("IDENT", "INT", "<", "(", "\\")


class TokenCursor:
    """Token stream with save/restore, shared by term and process parsing."""

    def __init__(self, tokens: list):
        self.toks = tokens
        self.i = 0

    def peek(self, ahead: int = 0) -> Tok:
        j = min(self.i + ahead, len(self.toks) - 1)
        return self.toks[j]

    def at(self, kind: str, ahead: int = 0) -> bool:
        return self.peek(ahead).kind == kind

    def eat(self, kind: str) -> Tok:
        t = self.peek()
        if t.kind != kind:
            raise ParseError(f"expected {kind!r}, found {t.text or t.kind!r}", t.pos)
        self.i += 1
        return t

    def try_eat(self, kind: str):
        if self.at(kind):
            return self.eat(kind)
        return None

    def save(self) -> int:
        return self.i

    def restore(self, mark: int) -> None:
        self.i = mark


def parse_surface(cur: TokenCursor, cmp_ok: bool = True, full: bool = True):
    """Parse one surface term.  ``full=False`` restricts to a single atom."""
    if not full:
        return _atom(cur)
    return _choice(cur, cmp_ok)


def _choice(cur: TokenCursor, cmp_ok: bool):
    t = _cmp(cur, cmp_ok)
    while cur.at("[]"):
        cur.eat("[]")
        t = SChoice(t, _cmp(cur, cmp_ok))
    return t


def _cmp(cur: TokenCursor, cmp_ok: bool):
    t = _sum(cur)
    if cmp_ok and (cur.at(">") or cur.at("=")):
        op = cur.eat(cur.peek().kind).kind
        return SBin(op, t, _sum(cur))
    return t


def _sum(cur: TokenCursor):
    t = _app(cur)
    while cur.at("+"):
        cur.eat("+")
        t = SBin("+", t, _app(cur))
    return t


def _app(cur: TokenCursor):
    t = _atom(cur)
    while cur.peek().kind in _ATOM_START:
        # stop before an input prefix: ident '(' '\' belongs to the process level
        if cur.at("(") and cur.at("\\", 1):
            break
        t = SApp(t, _atom(cur))
    return t


def _atom(cur: TokenCursor):
    t = cur.peek()
    if t.kind == "IDENT":
        cur.eat("IDENT")
        if cur.at("(") and not cur.at("\\", 1):
            cur.eat("(")
            args = [] if cur.at(")") else _args(cur, ")")
            cur.eat(")")
            return SCall(t.text, tuple(args))
        return SId(t.text)
    if t.kind == "INT":
        cur.eat("INT")
        return SInt(int(t.text))
    if t.kind == "<":
        cur.eat("<")
        items = [] if cur.at(">") else _args(cur, ">")
        cur.eat(">")
        return STuple(tuple(items))
    if t.kind == "(":
        cur.eat("(")
        if cur.try_eat(")"):
            return SParen(())
        items = _args(cur, ")")
        cur.eat(")")
        if len(items) == 1:
            return items[0]
        return SParen(tuple(items))
    if t.kind == "\\":
        cur.eat("\\")
        var = cur.eat("IDENT").text
        cur.eat(".")
        return SLam(var, _choice(cur, cmp_ok=True))
    raise ParseError(f"expected a term, found {t.text or t.kind!r}", t.pos)


def _args(cur: TokenCursor, closer: str) -> list:
    # comma-separated full terms; comparison is legal inside ( ) but a bare >
    # inside < > would close the tuple
    cmp_ok = closer == ")"
    args = [parse_surface(cur, cmp_ok=cmp_ok)]
    while cur.try_eat(","):
        args.append(parse_surface(cur, cmp_ok=cmp_ok))
    return args


def surface_idents(s) -> set:
    """All identifiers in a surface tree, minus lambda-bound ones."""
    if isinstance(s, SId):
        return {s.ident}
    if isinstance(s, SInt):
        return set()
    if isinstance(s, SCall):
        out = set()
        for a in s.args:
            out |= surface_idents(a)
        return out
    if isinstance(s, (STuple, SParen)):
        out = set()
        for a in s.items:
            out |= surface_idents(a)
        return out
    if isinstance(s, SLam):
        return surface_idents(s.body) - {s.var}
    if isinstance(s, (SApp,)):
        return surface_idents(s.fn) | surface_idents(s.arg)
    if isinstance(s, (SChoice,)):
        return surface_idents(s.left) | surface_idents(s.right)
    if isinstance(s, SBin):
        return surface_idents(s.left) | surface_idents(s.right)
    raise TypeError(f"not a surface term: {s!r}")


class ElaborationError(Exception):
    pass


class Elaborator:
    """Instance-specific translation of surface trees into calculus values.

    Instances override the four category methods plus ``binder_sorts``.  The
    environment is a mapping from identifier text to in-scope ``Name``.
    """

    def term(self, s, env: dict):
        raise NotImplementedError

    def pattern(self, s, env: dict, binders: tuple):
        # by default a pattern is just a term over the extended environment
        return self.term(s, env)

    def condition(self, s, env: dict):
        raise ElaborationError(f"no condition language: {s!r}")

    def assertion(self, s, env: dict):
        raise ElaborationError(f"no assertion language: {s!r}")

    def binder_sorts(self, spattern, binder_idents: tuple, subject_sort, env: dict) -> dict:
        """Sorts for un-annotated input binders; ambiguity is an error."""
        raise ElaborationError(
            "binder sorts cannot be inferred here; annotate as (\\x:sort)")

    def lookup(self, ident: str, env: dict) -> Name:
        if ident not in env:
            raise ElaborationError(f"undeclared name {ident!r}")
        return env[ident]


class TrivialLogic:
    """Elaboration of the two-valued condition language and unit assertion.

    Mix into elaborators for calculi whose conditions are just ``T``/``F``
    and whose only assertion is ``1``.
    """

    def condition(self, s, env: dict):
        from .terms import BOT, TOP
        if isinstance(s, SId) and s.ident not in env:
            if s.ident == "T":
                return TOP
            if s.ident == "F":
                return BOT
        raise ElaborationError(f"conditions here are T and F, got {s!r}")

    def assertion(self, s, env: dict):
        from .terms import UNIT
        if isinstance(s, SInt) and s.value == 1:
            return UNIT
        raise ElaborationError(f"the only assertion here is 1, got {s!r}")
