"""Process-level parser: agents, process files, message files.

Grammar (tightest binding last; ``|`` is loosest):

    agent  :=  item ('|' item)*
    item   :=  '!' item
            |  '(new' a:s, b ')' item
            |  '(|' assertion '|)'
            |  'case' cond ':' item ('[]' cond ':' item)*
            |  '0'
            |  ''' subject '<' object '>' ['.' item]
            |  subject '(\\' binders ')' pattern ['.' item]
            |  '(' agent ')'

Case branches and prefix continuations parse at item level, so a parallel
composition inside them needs parentheses.  Restriction binders take their
sort from an annotation, from a declaration of the same identifier, or from
the instance's unique restrictable sort.  Input binders take theirs from an
annotation or from the instance's pattern-sort inference.

A process file is ``instance: ID`` plus ``name x : sort`` declarations
followed by one agent.  ``--`` comments run to end of line.
"""

from __future__ import annotations

from typing import Callable, Mapping

from .agents import (
    Agent, AssertionAgent, Case, Input, NIL, Output, Parallel, Replication,
    Restriction,
)
from .instance import InstanceDefinition
from .names import Name
from .surface import (
    ElaborationError, ParseError, TokenCursor, ident_to_name, parse_surface,
    tokenize,
)

RESERVED = {"new", "case", "instance", "name", "msg", "agent"}


class _AgentParser:
    def __init__(self, cur: TokenCursor, inst: InstanceDefinition, env: dict):
        self.cur = cur
        self.inst = inst
        self.env = env
        if inst.elaborate is None:
            raise ParseError(f"instance {inst.name} has no surface elaborator")
        self.elab = inst.elaborate

    # -- helpers ------------------------------------------------------------

    def _binder(self, env: dict, default_sort=None) -> Name:
        tok = self.cur.eat("IDENT")
        if tok.text in RESERVED:
            raise ParseError(f"{tok.text!r} is a reserved word", tok.pos)
        sort = None
        if self.cur.try_eat(":"):
            sort = self._sort_ann()
        elif tok.text in env:
            sort = env[tok.text].sort
        elif default_sort is not None:
            sort = default_sort
        if sort is None:
            raise ParseError(
                f"cannot infer a sort for binder {tok.text!r}; annotate as {tok.text}:sort",
                tok.pos)
        return ident_to_name(tok.text, sort, tok.pos)

    # -- grammar ------------------------------------------------------------

    def agent(self, env: dict) -> Agent:
        p = self.item(env)
        while self.cur.try_eat("|"):
            p = Parallel(p, self.item(env))
        return p

    def item(self, env: dict) -> Agent:
        cur = self.cur
        t = cur.peek()
        if t.kind == "!":
            cur.eat("!")
            return Replication(self.item(env))
        if t.kind == "(|":
            cur.eat("(|")
            s = parse_surface(cur, cmp_ok=True)
            cur.eat("|)")
            return AssertionAgent(self.elab.assertion(s, env))
        if t.kind == "(" and cur.at("IDENT", 1) and cur.peek(1).text == "new":
            return self._restriction(env)
        if t.kind == "IDENT" and t.text == "case":
            return self._case(env)
        if t.kind == "INT" and t.text == "0":
            cur.eat("INT")
            return NIL
        if t.kind == "'":
            return self._output(env)
        if t.kind == "(":
            # a parenthesized agent, unless it turns out to be an input
            # subject such as (x)(\y)y
            mark = cur.save()
            try:
                cur.eat("(")
                inner = self.agent(env)
                cur.eat(")")
                if not (cur.at("(") and cur.at("\\", 1)):
                    return inner
            except (ParseError, ElaborationError):
                pass
            cur.restore(mark)
        return self._input(env)

    def _restriction(self, env: dict) -> Agent:
        cur = self.cur
        cur.eat("(")
        cur.eat("IDENT")  # 'new'
        default = None
        restrictable = sorted(self.inst.restrictable, key=lambda s: s.id)
        if len(restrictable) == 1:
            default = restrictable[0]
        names = [self._binder(env, default)]
        while cur.try_eat(","):
            names.append(self._binder(env, default))
        cur.eat(")")
        inner_env = dict(env)
        for n in names:
            inner_env[repr(n)] = n
        body = self.item(inner_env)
        for n in reversed(names):
            body = Restriction(n, body)
        return body

    def _case(self, env: dict) -> Agent:
        cur = self.cur
        cur.eat("IDENT")  # 'case'
        branches = []
        while True:
            cond = self.elab.condition(parse_surface(cur, cmp_ok=True), env)
            cur.eat(":")
            branches.append((cond, self.item(env)))
            if not cur.try_eat("[]"):
                break
        return Case(tuple(branches))

    def _output(self, env: dict) -> Agent:
        cur = self.cur
        cur.eat("'")
        subject = self.elab.term(parse_surface(cur, full=False), env)
        cur.eat("<")
        obj = self.elab.term(parse_surface(cur, cmp_ok=False), env)
        cur.eat(">")
        cont = self.item(env) if cur.try_eat(".") else NIL
        return Output(subject, obj, cont)

    def _input(self, env: dict) -> Agent:
        cur = self.cur
        s_subj = parse_surface(cur, full=False)
        subject = self.elab.term(s_subj, env)
        cur.eat("(")
        cur.eat("\\")
        raw: list = []
        if not cur.at(")"):
            raw.append(self._raw_binder())
            while cur.try_eat(","):
                raw.append(self._raw_binder())
        cur.eat(")")
        s_pat = parse_surface(cur, full=False)
        missing = tuple(ident for ident, sort in raw if sort is None)
        inferred: dict = {}
        if missing:
            inferred = self.elab.binder_sorts(
                s_pat, missing, self.inst.sort_of(subject), env)
        binders = []
        inner_env = dict(env)
        for ident, sort in raw:
            if sort is None:
                if ident not in inferred:
                    raise ElaborationError(
                        f"cannot infer a sort for binder {ident!r}; annotate as {ident}:sort")
                sort = inferred[ident]
            n = ident_to_name(ident, sort)
            binders.append(n)
            inner_env[ident] = n
        pattern = self.elab.pattern(s_pat, inner_env, tuple(binders))
        cont = self.item(inner_env) if cur.try_eat(".") else NIL
        return Input(subject, tuple(binders), pattern, cont)

    def _raw_binder(self):
        tok = self.cur.eat("IDENT")
        if tok.text in RESERVED:
            raise ParseError(f"{tok.text!r} is a reserved word", tok.pos)
        sort = None
        if self.cur.try_eat(":"):
            sort = self._sort_ann()
        return (tok.text, sort)

    def _sort_ann(self):
        tok = self.cur.eat("IDENT")
        try:
            return self.inst.sort_by_id(tok.text)
        except KeyError as e:
            raise ParseError(str(e), tok.pos) from None


def parse_agent(text: str, inst: InstanceDefinition, declarations=None) -> Agent:
    """Parse one agent.  ``declarations`` supplies the free names in scope:
    a mapping from identifier to Name, or an iterable of Names."""
    env =_normalize_decls(declarations)
    cur = TokenCursor(tokenize(text))
    p = _AgentParser(cur, inst, env)
    agent = p.agent(env)
    cur.eat("EOF")
    return agent


def parse_term(text: str, inst: InstanceDefinition, declarations=None):
    """Parse one instance term (for message files and tests)."""
    env = _normalize_decls(declarations)
    cur = TokenCursor(tokenize(text))
    s = parse_surface(cur, cmp_ok=False)
    cur.eat("EOF")
    return inst.elaborate.term(s, env)


def _normalize_decls(declarations) -> dict:
    if declarations is None:
        return {}
    if isinstance(declarations, Mapping):
        return dict(declarations)
    return {repr(n): n for n in declarations}


# -- files ------------------------------------------------------------------


class ProcessFileError(Exception):
    pass


def parse_process_file(text: str, resolve: Callable[[str], InstanceDefinition]):
    """Parse an ``instance:`` header, ``name`` declarations and one agent.

    Returns ``(instance, agent, env)`` where env maps declared identifiers
    to their names.
    """
    inst = None
    env: dict = {}
    body: list = []
    for lineno, rawline in enumerate(text.splitlines(), start=1):
        line = rawline.split("--", 1)[0].strip()
        if not line:
            continue
        if line.startswith("instance:"):
            if inst is not None:
                raise ProcessFileError(f"line {lineno}: duplicate instance header")
            inst = resolve(line.split(":", 1)[1].strip())
            continue
        if line.split(":", 1)[0].strip() == "agent" and not body:
            rest = line.split(":", 1)[1]
            if rest.strip():
                body.append(rest)
            continue
        if line.startswith("name "):
            if body:
                raise ProcessFileError(
                    f"line {lineno}: name declarations must precede the agent")
            if inst is None:
                raise ProcessFileError(f"line {lineno}: name declaration before instance header")
            _parse_decl(line[5:], inst, env, lineno)
            continue
        body.append(rawline.split("--", 1)[0])
    if inst is None:
        raise ProcessFileError("missing 'instance:' header")
    source = "\n".join(body).strip()
    if not source:
        raise ProcessFileError("file has no agent")
    agent = parse_agent(source, inst, env)
    return inst, agent, env


def _parse_decl(decl: str, inst: InstanceDefinition, env: dict, lineno: int) -> None:
    if ":" not in decl:
        raise ProcessFileError(f"line {lineno}: expected 'name x : sort'")
    idents, sort_id = decl.rsplit(":", 1)
    try:
        sort = inst.sort_by_id(sort_id.strip())
    except KeyError as e:
        raise ProcessFileError(f"line {lineno}: {e.args[0]}") from None
    for ident in idents.split(","):
        ident = ident.strip()
        if not ident:
            continue
        if ident in env:
            raise ProcessFileError(f"line {lineno}: {ident!r} declared twice")
        if ident in RESERVED:
            raise ProcessFileError(f"line {lineno}: {ident!r} is a reserved word")
        env[ident] = ident_to_name(ident, sort)


def parse_message_file(text: str, inst: InstanceDefinition, env: dict) -> dict:
    """Message files: optional ``name`` declarations plus ``msg sort : term``
    lines.  Returns a dict Sort -> tuple of terms, merged left to right."""
    env = dict(env)
    messages: dict = {}
    for lineno, rawline in enumerate(text.splitlines(), start=1):
        line = rawline.split("--", 1)[0].strip()
        if not line:
            continue
        if line.startswith("name "):
            _parse_decl(line[5:], inst, env, lineno)
            continue
        if line.startswith("msg "):
            rest = line[4:]
            if ":" not in rest:
                raise ProcessFileError(f"line {lineno}: expected 'msg sort : term'")
            sort_id, term_text = rest.split(":", 1)
            sort = inst.sort_by_id(sort_id.strip())
            term = parse_term(term_text.strip(), inst, env)
            messages.setdefault(sort, [])
            if term not in messages[sort]:
                messages[sort].append(term)
            continue
        raise ProcessFileError(f"line {lineno}: cannot read {line!r}")
    return {s: tuple(ts) for s, ts in messages.items()}
