"""Sorted term rewriting and the calculus construction over normal forms.

A ``SortedSignature`` splits its symbols into constructors and defined
symbols; rules must be rooted at defined symbols, so the stable terms (those
that cannot change under any substitution-plus-normalization) are exactly
the terms free of defined symbols.  ``build_rewrite_instance`` packages a
convergent system as a calculus whose data are the normal forms, whose
substitution is replace-then-normalize, and whose patterns may bind exactly
the names kept out of defined-symbol subterms.

The module also houses a deliberately nonconfluent reduction: beta plus
erratic choice under the reduction contexts ``[] | R M | (lam x.M) R``,
enumerated breadth-first into normal-form sets for the ndlam instance.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import combinations

from .instance import InstanceDefinition
from .names import Name, Sort, fresh_name, supp
from .surface import (
    ElaborationError, Elaborator, SCall, SId, SInt, SParen, TokenCursor,
    TrivialLogic, parse_surface, tokenize,
)
from .terms import App, Choice, Func, Lam, TOP, BOT, UNIT


class FuelExhausted(Exception):
    """A reduction budget ran out with work left over."""


@dataclass(frozen=True)
class SymbolDecl:
    name: str
    arg_sorts: tuple
    result: Sort
    defined: bool = False


@dataclass(frozen=True)
class SortedSignature:
    sorts: tuple
    symbols: dict

    @staticmethod
    def build(sorts, decls) -> "SortedSignature":
        table = {}
        for d in decls:
            if d.name in table:
                raise ValueError(f"duplicate symbol {d.name!r}")
            table[d.name] = d
        return SortedSignature(tuple(sorts), table)

    def decl(self, symbol: str) -> SymbolDecl:
        try:
            return self.symbols[symbol]
        except KeyError:
            raise KeyError(f"signature has no symbol {symbol!r}") from None

    def is_defined(self, symbol: str) -> bool:
        return self.decl(symbol).defined

    def sort_of(self, term) -> Sort:
        if isinstance(term, Name):
            return term.sort
        if isinstance(term, Func):
            return self.decl(term.symbol).result
        raise TypeError(f"not an algebra term: {term!r}")

    def well_sorted(self, term) -> bool:
        if isinstance(term, Name):
            return term.sort in self.sorts
        if not isinstance(term, Func):
            return False
        d = self.symbols.get(term.symbol)
        if d is None or len(d.arg_sorts) != len(term.args):
            return False
        return all(
            self.well_sorted(a) and self.sort_of(a) == s
            for a, s in zip(term.args, d.arg_sorts))


@dataclass(frozen=True)
class RewriteRule:
    lhs: Func
    rhs: object

    def __repr__(self) -> str:
        return f"{self.lhs!r} -> {self.rhs!r}"


def check_rule(sig: SortedSignature, rule: RewriteRule) -> None:
    if not (isinstance(rule.lhs, Func) and sig.is_defined(rule.lhs.symbol)):
        raise ValueError(f"rule head must be a defined symbol: {rule!r}")
    if not supp(rule.rhs) <= supp(rule.lhs):
        raise ValueError(f"right side introduces variables: {rule!r}")
    if not (sig.well_sorted(rule.lhs) and sig.well_sorted(rule.rhs)):
        raise ValueError(f"rule is not well-sorted: {rule!r}")
    if sig.sort_of(rule.lhs) != sig.sort_of(rule.rhs):
        raise ValueError(f"rule changes sort: {rule!r}")


def syntactic_match(pattern, term, variables, bound=None):
    """First-order match of ``pattern`` against ``term``; names in
    ``variables`` bind (consistently when repeated), other names are
    literals.  Returns the binding dict or None."""
    if bound is None:
        bound = {}
    if isinstance(pattern, Name):
        if pattern in variables:
            if bound.setdefault(pattern, term) != term:
                return None
            return bound
        return bound if pattern == term else None
    if (isinstance(pattern, Func) and isinstance(term, Func)
            and pattern.symbol == term.symbol
            and len(pattern.args) == len(term.args)):
        for p, t in zip(pattern.args, term.args):
            if syntactic_match(p, t, variables, bound) is None:
                return None
        return bound
    return None


def replace(term, mapping: dict):
    if isinstance(term, Name):
        return mapping.get(term, term)
    return Func(term.symbol, tuple(replace(a, mapping) for a in term.args))


def normalize(sig: SortedSignature, rules, term, fuel: int = 2000):
    """Innermost normalization; exhausting ``fuel`` means the rule set is
    not convergent (or the budget is unrealistic) and raises, it never
    returns a wrong normal form."""
    budget = [fuel]
    compiled = [(r, supp(r.lhs)) for r in rules]

    def norm(t):
        if isinstance(t, Name):
            return t
        t = Func(t.symbol, tuple(norm(a) for a in t.args))
        for rule, lhs_vars in compiled:
            got = syntactic_match(rule.lhs, t, lhs_vars)
            if got is not None:
                budget[0] -= 1
                if budget[0] < 0:
                    raise FuelExhausted(
                        f"normalization of {term!r} ran out of fuel; "
                        "is the rule set convergent?")
                return norm(replace(rule.rhs, got))
        return t

    return norm(term)


def is_stable(sig: SortedSignature, term) -> bool:
    """Stable terms survive substitution-plus-normalization unrewritten:
    no defined symbol occurs anywhere."""
    if isinstance(term, Name):
        return True
    if sig.is_defined(term.symbol):
        return False
    return all(is_stable(sig, a) for a in term.args)


def term_match(obj, binders: tuple, pattern) -> tuple:
    """Match a pattern with the given binders as variables against ``obj``;
    at most one solution, absent when a repeated binder is inconsistent or a
    literal position disagrees."""
    got = syntactic_match(pattern, obj, set(binders))
    if got is None or set(got) != set(binders):
        return ()
    return (tuple(got[x] for x in binders),)


def stable_binders(sig: SortedSignature, pattern, extra_taint=None) -> tuple:
    """All name sets bindable in ``pattern``: the powerset of its names
    after dropping every name with an occurrence inside a defined-symbol
    subterm, plus whatever ``extra_taint`` rules out."""
    tainted: set = set()

    def walk(t, inside):
        if isinstance(t, Name):
            if inside:
                tainted.add(t)
            return
        inside = inside or sig.is_defined(t.symbol)
        for a in t.args:
            walk(a, inside)

    walk(pattern, False)
    if extra_taint is not None:
        tainted |= set(extra_taint(pattern))
    free = sorted(supp(pattern) - tainted, key=lambda n: n.key)
    out = []
    for r in range(len(free) + 1):
        out.extend(frozenset(c) for c in combinations(free, r))
    return tuple(out)


# -- declarative rule files ---------------------------------------------------


def parse_rule_file(text: str):
    """Parse ``sort/cons/defn/rule`` statements (separated by ``;`` or
    newlines) into a signature and its rules."""
    statements = []
    for line in text.splitlines():
        line = re.sub(r"--.*", "", line)
        statements.extend(p.strip() for p in line.split(";"))
    statements = [s for s in statements if s]

    sorts: dict = {}
    decls: list = []
    rule_texts: list = []
    for st in statements:
        head, _, rest = st.partition(" ")
        rest = rest.strip()
        if head == "sort":
            if not rest.isidentifier():
                raise ValueError(f"bad sort name {rest!r}")
            sorts.setdefault(rest, Sort(rest))
        elif head in ("cons", "defn"):
            decls.append(_parse_symbol_decl(rest, sorts, defined=head == "defn"))
        elif head == "rule":
            rule_texts.append(st[len("rule"):].strip())
        else:
            raise ValueError(f"unknown statement {st!r}")

    sig = SortedSignature.build(
        tuple(sorts[k] for k in sorted(sorts)), decls)
    rules = tuple(_parse_rule(rt, sig) for rt in rule_texts)
    return sig, rules


def _parse_symbol_decl(text: str, sorts: dict, defined: bool) -> SymbolDecl:
    name, colon, sig_text = text.partition(":")
    name = name.strip()
    if not colon or not name.isidentifier():
        raise ValueError(f"bad symbol declaration {text!r}")
    args_text, arrow, result_text = sig_text.rpartition("->")
    if not arrow:
        args_text, result_text = "", sig_text
    try:
        arg_sorts = tuple(sorts[s] for s in args_text.split())
        result = sorts[result_text.strip()]
    except KeyError as e:
        raise ValueError(f"undeclared sort {e.args[0]!r} in {text!r}") from None
    return SymbolDecl(name, arg_sorts, result, defined)


def _parse_rule(text: str, sig: SortedSignature) -> RewriteRule:
    lhs_text, arrow, rhs_text = text.partition("->")
    if not arrow:
        raise ValueError(f"rule needs '->': {text!r}")
    varmap: dict = {}
    s_lhs = _parse_term_text(lhs_text)
    if not (isinstance(s_lhs, SCall)
            or (isinstance(s_lhs, SId) and s_lhs.ident in sig.symbols)):
        raise ValueError(f"rule head must be a defined symbol: {text!r}")
    lhs = _rule_term(s_lhs, sig, None, varmap)
    rhs = _rule_term(_parse_term_text(rhs_text), sig, sig.sort_of(lhs), varmap,
                     rhs_of=text)
    rule = RewriteRule(lhs, rhs)
    check_rule(sig, rule)
    return rule


def _parse_term_text(text: str):
    cur = TokenCursor(tokenize(text.strip()))
    s = parse_surface(cur, cmp_ok=False)
    cur.eat("EOF")
    return s


def _rule_term(s, sig: SortedSignature, expected, varmap: dict, rhs_of=None):
    if isinstance(s, SCall) or (isinstance(s, SId) and s.ident in sig.symbols):
        symbol = s.symbol if isinstance(s, SCall) else s.ident
        args = s.args if isinstance(s, SCall) else ()
        d = sig.decl(symbol)
        if len(d.arg_sorts) != len(args):
            raise ValueError(f"{symbol!r} expects {len(d.arg_sorts)} arguments")
        if expected is not None and d.result != expected:
            raise ValueError(f"{symbol!r} has sort {d.result.id}, wanted {expected.id}")
        return Func(symbol, tuple(
            _rule_term(a, sig, so, varmap, rhs_of)
            for a, so in zip(args, d.arg_sorts)))
    if isinstance(s, SId):
        if s.ident in varmap:
            n = varmap[s.ident]
            if expected is not None and n.sort != expected:
                raise ValueError(f"variable {s.ident!r} used at two sorts")
            return n
        if rhs_of is not None:
            raise ValueError(f"right side introduces variable {s.ident!r}: {rhs_of!r}")
        if expected is None:
            raise ValueError(f"cannot infer a sort for variable {s.ident!r}")
        n = Name(s.ident, 0, expected)
        varmap[s.ident] = n
        return n
    raise ValueError(f"not a rule term: {s!r}")


# -- instance construction -----------------------------------------------------


class AlgebraElaborator(TrivialLogic, Elaborator):
    """Surface terms are names, signature symbols, and (optionally) numeral
    sugar ``n`` for n-fold successor application.

    ``post`` runs once on each finished term; the instance builder installs
    normalization there, so written terms always elaborate to normal forms.
    """

    def __init__(self, sig: SortedSignature, numeral=None, post=None):
        self.sig = sig
        self.numeral = numeral
        self.post = post

    def term(self, s, env):
        t = self._term(s, env)
        return self.post(t) if self.post is not None else t

    def _term(self, s, env):
        if isinstance(s, SId):
            if s.ident in env:
                return env[s.ident]
            d = self.sig.symbols.get(s.ident)
            if d is not None and not d.arg_sorts:
                return Func(s.ident)
            raise ElaborationError(f"undeclared name {s.ident!r}")
        if isinstance(s, SCall):
            d = self.sig.symbols.get(s.symbol)
            if d is None:
                raise ElaborationError(f"unknown symbol {s.symbol!r}")
            if len(d.arg_sorts) != len(s.args):
                raise ElaborationError(
                    f"{s.symbol!r} expects {len(d.arg_sorts)} arguments, got {len(s.args)}")
            return Func(s.symbol, tuple(self._term(a, env) for a in s.args))
        if isinstance(s, SInt) and self.numeral is not None:
            zero, succ = self.numeral
            t = Func(zero)
            for _ in range(s.value):
                t = Func(succ, (t,))
            return t
        if isinstance(s, SParen) and len(s.items) == 1:
            return self._term(s.items[0], env)
        raise ElaborationError(f"not a term of this calculus: {s!r}")

    def binder_sorts(self, spattern, binder_idents, subject_sort, env):
        found: dict = {}

        def walk(s, expected):
            if isinstance(s, SId) and s.ident in binder_idents:
                if expected is None:
                    return
                if found.setdefault(s.ident, expected) != expected:
                    raise ElaborationError(
                        f"binder {s.ident!r} occurs at two different sorts")
            elif isinstance(s, SCall):
                d = self.sig.symbols.get(s.symbol)
                if d is not None and len(d.arg_sorts) == len(s.args):
                    for a, so in zip(s.args, d.arg_sorts):
                        walk(a, so)
            elif isinstance(s, SParen) and len(s.items) == 1:
                walk(s.items[0], expected)

        walk(spattern, None)
        return found


def build_rewrite_instance(sig: SortedSignature, rules,
                           extra_binder_filter=None, name: str = "rewrite",
                           numeral=None, about: str = "", fuel: int = 2000,
                           ) -> InstanceDefinition:
    """Calculus over the normal forms of a convergent rule set.

    ``extra_binder_filter`` maps a pattern to additional unbindable names
    (beyond those inside defined-symbol subterms).  Convergence is the
    author's promise; normalization failures surface as FuelExhausted.
    """
    for r in rules:
        check_rule(sig, r)

    def subst_term(t, sub):
        return normalize(sig, rules, replace(t, sub.as_dict()), fuel)

    def match(obj, binders, pattern):
        good = []
        for lt in term_match(obj, binders, pattern):
            mapping = dict(zip(binders, lt))
            if normalize(sig, rules, replace(pattern, mapping), fuel) == obj:
                good.append(lt)
        return tuple(good)

    def binders_of(pattern):
        return stable_binders(sig, pattern, extra_binder_filter)

    def gen_sort(rng, names, sort, depth):
        pool = [n for n in names if isinstance(n, Name) and n.sort == sort]
        cons = [d for d in sig.symbols.values()
                if not d.defined and d.result == sort
                and (depth > 0 or not d.arg_sorts)]
        use_name = pool and (not cons or rng.random() < 0.5)
        if use_name:
            return rng.choice(pool)
        if not cons:
            return None
        d = rng.choice(cons)
        args = []
        for s in d.arg_sorts:
            a = gen_sort(rng, names, s, depth - 1)
            if a is None:
                return None
            args.append(a)
        return Func(d.name, tuple(args))

    def term_gen(rng, names, depth=3):
        for sort in rng.sample(list(sig.sorts), len(sig.sorts)):
            t = gen_sort(rng, names, sort, depth)
            if t is not None:
                return t
        return rng.choice(list(names))

    def messages(sort, names):
        pool = sorted((n for n in names if isinstance(n, Name)), key=lambda n: n.key)
        base: dict = {}
        for s in sig.sorts:
            vals = [n for n in pool if n.sort == s][:1]
            vals += [Func(d.name) for d in sig.symbols.values()
                     if not d.defined and not d.arg_sorts and d.result == s][:1]
            base[s] = vals
        out = [n for n in pool if n.sort == sort]
        out += [Func(d.name) for d in sig.symbols.values()
                if not d.defined and not d.arg_sorts and d.result == sort]
        for d in sig.symbols.values():
            if d.defined or not d.arg_sorts or d.result != sort:
                continue
            combos = [()]
            for s in d.arg_sorts:
                combos = [c + (v,) for c in combos for v in base[s]]
            out += [Func(d.name, c) for c in combos[:4]]
        return tuple(dict.fromkeys(out))

    return InstanceDefinition(
        name=name,
        sorts=tuple(sig.sorts),
        restrictable=frozenset(sig.sorts),
        can_receive=frozenset((s, t) for s in sig.sorts for t in sig.sorts),
        can_send=frozenset((s, t) for s in sig.sorts for t in sig.sorts),
        can_subst_by=frozenset((s, s) for s in sig.sorts),
        unit_assertion=UNIT,
        compose=lambda a, b: UNIT,
        entails=lambda psi, cond: cond == TOP,
        channel_eq_condition=lambda m, k: TOP if m == k else BOT,
        sort_of=sig.sort_of,
        substitute_term=subst_term,
        match=match,
        pattern_binders=binders_of,
        condition_enumerator=lambda names: (TOP, BOT),
        assertion_enumerator=lambda: (UNIT,),
        term_generator=term_gen,
        pattern_generator=lambda rng, names: term_gen(rng, names, depth=2),
        condition_generator=lambda rng, names: TOP if rng.random() < 0.7 else BOT,
        assertion_generator=lambda rng, names: UNIT,
        message_generator=messages,
        elaborate=AlgebraElaborator(
            sig, numeral, post=lambda t: normalize(sig, rules, t, fuel)),
        notes={"about": about or f"normal forms of {len(rules)} rewrite rules"},
    )


# -- nondeterministic lambda reduction ------------------------------------------


def lambda_substitute(term, name: Name, repl):
    """Capture-avoiding single-name substitution on lambda terms."""
    if isinstance(term, Name):
        return repl if term == name else term
    if isinstance(term, App):
        return App(lambda_substitute(term.fn, name, repl),
                   lambda_substitute(term.arg, name, repl))
    if isinstance(term, Choice):
        return Choice(lambda_substitute(term.left, name, repl),
                      lambda_substitute(term.right, name, repl))
    if isinstance(term, Lam):
        if term.binder == name:
            return term
        if term.binder in supp(repl):
            avoid = supp(term.body) | supp(repl) | {name}
            nb = fresh_name(term.binder.sort, avoid, base=term.binder.base)
            body = lambda_substitute(term.body, term.binder, nb)
            return Lam(nb, lambda_substitute(body, name, repl))
        return Lam(term.binder, lambda_substitute(term.body, name, repl))
    raise TypeError(f"not a lambda term: {term!r}")


def lambda_reducts(term) -> tuple:
    """One-step reducts under ``[] | R M | (lam x.M) R``: beta and erratic
    choice fire at context holes; nothing reduces under a lambda or inside
    a choice."""
    out = []
    if isinstance(term, Choice):
        out += [term.left, term.right]
    elif isinstance(term, App):
        if isinstance(term.fn, Lam):
            out.append(lambda_substitute(term.fn.body, term.fn.binder, term.arg))
            out += [App(term.fn, r) for r in lambda_reducts(term.arg)]
        out += [App(r, term.arg) for r in lambda_reducts(term.fn)]
    return tuple(out)


def normal_form_set(term, fuel: int = 500) -> frozenset:
    """All reduction-normal forms reachable from ``term``.

    ``fuel`` bounds the number of distinct terms explored; running out with
    a frontier left raises, since missing normal forms would silently change
    matching."""
    from .names import alpha_canonical

    seen = set()
    normals = []
    frontier = [term]
    while frontier:
        t = frontier.pop()
        key = repr(alpha_canonical(t))
        if key in seen:
            continue
        if len(seen) >= fuel:
            raise FuelExhausted(
                f"normal-form search from {term!r} exceeded {fuel} terms")
        seen.add(key)
        reds = lambda_reducts(t)
        if reds:
            frontier.extend(reds)
        else:
            normals.append(t)
    out = []
    keys = set()
    for t in normals:
        k = repr(alpha_canonical(t))
        if k not in keys:
            keys.add(k)
            out.append(t)
    return frozenset(out)
