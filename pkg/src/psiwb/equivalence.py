"""Strong and weak bisimilarity checkers with verifiable witnesses.

The checkers play the bisimulation game over triples of an environment
assertion and two agents.  A triple's obligations follow the definition
clause by clause: static equivalence (or static implication for the weak
variants), symmetry, extension with every assertion from a finite
universe, and simulation with the matching discipline of the chosen
kind.  The game graph is explored from the root triple and refined to
its greatest fixpoint: a triple is discarded when some obligation
cannot be met by surviving triples, and the survivors form a candidate
relation that ``check_candidate_relation`` certifies independently.

Finitization choices, all visible in ``EquivConfig``: assertion
extension quantifies over ``assertion_universe`` (the unit assertion is
always included and composition with unit is collapsed by the monoid
law); input labels range over the configured message pools plus every
object of either agent's output commitments; weak answers enumerate
bounded tau closures.  Exceeding a budget yields an ``inconclusive``
verdict, never a wrong boolean.

Derivative states are reduced to ``canonical_form`` and triples whose
two sides coincide up to the structural laws are accepted outright:
structural congruence is contained in bisimilarity, so matching up to
the laws only enlarges the relation by pairs that are bisimilar anyway,
and it keeps replicated state spaces finite.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations

from .agents import Agent, frame_of, substitute_agent
from .canon import canonical_form
from .instance import InstanceDefinition, Substitution, UnsupportedCheck
from .names import alpha_canonical, fresh_name, supp
from .names import sw as _sw
from .semantics import (
    TAU, InputAction, OutputAction, SemanticsConfig, Transition, bound_names,
    commitments, input_transition, tau_closure,
)


class BudgetExceeded(Exception):
    """A state, triple, or closure budget ran out mid-check."""


# -- configuration and result types ---------------------------------------------


@dataclass(frozen=True)
class EquivConfig:
    """Knobs for the bisimulation game.

    ``assertion_universe`` holds the assertions quantified over by the
    extension clause, beyond the unit assertion which is always
    included.  ``substitution_samples`` lists the substitution sequences
    a congruence-closure check applies (the empty sequence is always
    included).  ``state_budget`` caps the number of game triples.
    """

    semantics: SemanticsConfig = field(default_factory=SemanticsConfig)
    assertion_universe: tuple = ()
    substitution_samples: tuple = ()
    state_budget: int = 2000


@dataclass(frozen=True)
class CandidateRelation:
    """A finite ternary relation: (assertion, agent, agent) triples."""

    triples: tuple

    def symmetric(self) -> "CandidateRelation":
        """The relation plus every mirrored triple."""
        seen, out = set(), []
        for psi, p, q in self.triples:
            for t in ((psi, p, q), (psi, q, p)):
                k = _triple_key(t[0], t[1], t[2])
                if k not in seen:
                    seen.add(k)
                    out.append(t)
        return CandidateRelation(tuple(out))

    def keys(self) -> frozenset:
        return frozenset(_triple_key(psi, p, q) for psi, p, q in self.triples)

    def __len__(self) -> int:
        return len(self.triples)


@dataclass(frozen=True)
class Verdict:
    """Outcome of a bisimilarity check.

    ``result`` is ``"bisimilar"`` (with a certified witness relation),
    ``"distinguished"`` (with an alternating challenge/failure trace
    ending in the failed clause), or ``"inconclusive"`` (with the budget
    or limit that ran out in ``reason``).
    """

    result: str
    witness: CandidateRelation | None = None
    evidence: tuple = ()
    reason: str = ""

    def __bool__(self) -> bool:
        return self.result == "bisimilar"


@dataclass(frozen=True)
class CheckReport:
    """Verdict of certifying a candidate relation, with the first failing clause."""

    ok: bool
    clause: str = ""
    triple: tuple = ()
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _triple_key(psi, p: Agent, q: Agent) -> str:
    return repr(alpha_canonical((psi, canonical_form(p), canonical_form(q))))


# -- static equivalence ------------------------------------------------------------


def _frame_holds(inst: InstanceDefinition, psi, frame, cond) -> bool:
    fr = frame.freshened(supp(psi) | supp(cond))
    return inst.entails(_compose(inst, psi, fr.assertion), cond)


def _compose(inst: InstanceDefinition, a, b):
    if b == inst.unit_assertion:
        return a
    if a == inst.unit_assertion:
        return b
    return inst.compose(a, b)


def _implication_gap(inst: InstanceDefinition, psi, p: Agent, q: Agent):
    """A condition entailed by psi x F(p) but not psi x F(q), or None."""
    fp, fq = frame_of(inst, p), frame_of(inst, q)
    if repr(alpha_canonical(fp)) == repr(alpha_canonical(fq)):
        return None
    if inst.condition_enumerator is None:
        raise UnsupportedCheck(
            f"instance {inst.name} does not enumerate conditions; "
            "static comparison of differing frames is undecidable here")
    scope = supp(psi) | supp(fp) | supp(fq)
    for cond in inst.condition_enumerator(scope):
        if _frame_holds(inst, psi, fp, cond) and not _frame_holds(inst, psi, fq, cond):
            return cond
    return None


def statically_implies(inst: InstanceDefinition, psi, p: Agent, q: Agent,
                       cfg: EquivConfig | None = None) -> bool:
    """Every condition of psi x F(p) also holds in psi x F(q)."""
    return _implication_gap(inst, psi, p, q) is None


def static_equivalent(inst: InstanceDefinition, psi, p: Agent, q: Agent,
                      cfg: EquivConfig | None = None) -> bool:
    """psi x F(p) and psi x F(q) entail the same conditions."""
    return (_implication_gap(inst, psi, p, q) is None
            and _implication_gap(inst, psi, q, p) is None)


# -- transition matching -----------------------------------------------------------


def _freshen_opened(t: Transition, avoid) -> Transition:
    """An alpha-variant of a bound output whose opened names avoid ``avoid``."""
    act = t.action
    opened = bound_names(act)
    if not opened:
        return t
    taken = set(avoid) | set(supp(t)) | set(opened)
    obj, deriv, fresh = act.obj, t.derivative, []
    for b in opened:
        nb = fresh_name(b.sort, taken, base=b.base)
        taken.add(nb)
        obj, deriv = _sw(b, nb, obj), _sw(b, nb, deriv)
        fresh.append(nb)
    action = OutputAction(act.subject, tuple(fresh), obj)
    return Transition(t.env, t.source, action, deriv)


def _answers(challenge: Transition, candidates, avoid) -> list:
    """Derivatives of ``candidates`` whose action equals the challenge's.

    Bound outputs are aligned by renaming a candidate's opened names to
    the challenge's, trying every sort-respecting pairing.
    """
    want = challenge.action
    opened = bound_names(want)
    out = []
    for t in candidates:
        if type(t.action) is not type(want):
            continue
        if not opened:
            if t.action == want:
                out.append(t.derivative)
            continue
        have = bound_names(t.action)
        if len(have) != len(opened) or t.action.subject != want.subject:
            continue
        t = _freshen_opened(t, set(avoid) | set(opened) | supp(challenge))
        have = bound_names(t.action)
        for perm in permutations(range(len(have))):
            pairs = [(have[j], opened[i]) for i, j in enumerate(perm)]
            if any(a.sort != b.sort for a, b in pairs):
                continue
            obj, deriv = t.action.obj, t.derivative
            for a, b in pairs:
                obj, deriv = _sw(a, b, obj), _sw(a, b, deriv)
            if OutputAction(t.action.subject, opened, obj) == want:
                out.append(deriv)
    return out


# -- the game ---------------------------------------------------------------------

_FACT, _ALL, _ANY = "fact", "all", "any"


class _Game:
    """Shared machinery: obligations per triple, fixpoint, certification.

    Obligations are triples ``(mode, clause, payload)``: a ``fact`` is an
    immediate boolean with detail, ``all`` requires every successor to be
    good, ``any`` at least one.  Successors are ``(kind, psi, p, q)``
    tuples; agents are kept in canonical form.
    """

    def __init__(self, inst: InstanceDefinition, cfg: EquivConfig | None):
        self.inst = inst
        self.cfg = cfg or EquivConfig()
        self.universe = self._build_universe()
        self._coms = {}
        self._closures = {}

    def _build_universe(self) -> tuple:
        unit = self.inst.unit_assertion
        out = [unit]
        for a in self.cfg.assertion_universe:
            if a != unit and a not in out:
                out.append(a)
        return tuple(out)

    # transition plumbing, cached per (psi, state)

    def _commitments(self, psi, state: Agent):
        key = repr(alpha_canonical((psi, state)))
        if key not in self._coms:
            self._coms[key] = commitments(self.inst, psi, state, self.cfg.semantics)
        return self._coms[key]

    def _closure(self, psi, state: Agent) -> tuple:
        key = repr(alpha_canonical((psi, state)))
        if key not in self._closures:
            cl = tau_closure(self.inst, psi, state, self.cfg.semantics)
            if cl.truncated:
                raise BudgetExceeded(
                    f"tau closure truncated at {len(cl.states)} states")
            self._closures[key] = cl.states
        return self._closures[key]

    def _message_pool(self, psi, p: Agent, q: Agent) -> tuple:
        """Input-label objects: configured pools plus both sides' outputs."""
        seen, pool = set(), []
        for obj in self.cfg.semantics.message_pool():
            if repr(obj) not in seen:
                seen.add(repr(obj))
                pool.append(obj)
        for state in (p, q):
            for t in self._commitments(psi, state).outputs:
                obj = t.action.obj
                if repr(obj) not in seen:
                    seen.add(repr(obj))
                    pool.append(obj)
        return tuple(pool)

    def _challenges(self, psi, p: Agent, q: Agent, avoid) -> list:
        com = self._commitments(psi, p)
        out = list(com.taus)
        out.extend(_freshen_opened(t, avoid) for t in com.outputs)
        for cap in com.inputs:
            for obj in self._message_pool(psi, p, q):
                out.extend(input_transition(cap, obj))
        return out

    def _moves(self, psi, state: Agent, challenge: Transition, avoid) -> list:
        """Strong answers of ``state`` to the challenge action."""
        com = self._commitments(psi, state)
        act = challenge.action
        if act == TAU:
            return [t.derivative for t in com.taus]
        if isinstance(act, InputAction):
            found = []
            for cap in com.inputs:
                for t in input_transition(cap, act.obj):
                    if t.action == act:
                        found.append(t.derivative)
            return found
        return _answers(challenge, com.outputs, avoid)

    # clause obligations

    def requirements(self, kind: str, psi, p: Agent, q: Agent) -> list:
        inst, reqs = self.inst, []
        avoid = supp(psi) | supp(p) | supp(q)
        reqs.append((_ALL, "symmetry", [((kind, psi, q, p), "mirrored triple")]))
        for ext in self.universe[1:]:
            reqs.append((_ALL, "assertion-extension",
                         [((kind, _compose(inst, psi, ext), p, q), repr(ext))]))
        if kind == "strong":
            gap = _implication_gap(inst, psi, p, q)
            if gap is None:
                gap = _implication_gap(inst, psi, q, p)
            reqs.append((_FACT, "static-equivalence", gap is None,
                         "" if gap is None else f"frames disagree on {gap!r}"))
            for ch in self._challenges(psi, p, q, avoid):
                succ = [((kind, psi, ch.derivative, d), "answer")
                        for d in self._moves(psi, q, ch, avoid)]
                reqs.append((_ANY, "simulation", succ, f"challenge {ch.action!r}"))
            return reqs

        # weak and weak-tau share clauses 1 and 4b
        for ext in self.universe:
            choices = []
            for q1 in self._closure(psi, q):
                if _implication_gap(inst, psi, p, q1) is not None:
                    continue
                for q2 in self._closure(_compose(inst, psi, ext), q1):
                    choices.append((("weak-static", _compose(inst, psi, ext), p, q2),
                                    f"via {q1!r}"))
            reqs.append((_ANY, "weak-static-implication", choices, repr(ext)))
        for ch in self._challenges(psi, p, q, avoid):
            if ch.action == TAU:
                if kind == "weak-tau":
                    # at least one real tau, then any number more; the
                    # continuation obligation is plain weak bisimilarity
                    succ = []
                    for t in self._commitments(psi, q).taus:
                        for q2 in self._closure(psi, t.derivative):
                            succ.append((("weak", psi, ch.derivative, q2), "answer"))
                    reqs.append((_ANY, "tau-simulation", succ,
                                 f"challenge {ch.action!r}"))
                else:
                    succ = [((kind, psi, ch.derivative, q1), "answer")
                            for q1 in self._closure(psi, q)]
                    reqs.append((_ANY, "tau-simulation", succ,
                                 f"challenge {ch.action!r}"))
                continue
            for ext in self.universe:
                succ = []
                for q1 in self._closure(psi, q):
                    if _implication_gap(inst, psi, p, q1) is not None:
                        continue
                    for d in self._moves(psi, q1, ch, avoid):
                        for q3 in self._closure(_compose(inst, psi, ext), d):
                            succ.append(((kind, _compose(inst, psi, ext),
                                          ch.derivative, q3), "answer"))
                reqs.append((_ANY, "simulation", succ,
                             f"challenge {ch.action!r} with extension {ext!r}"))
        return reqs

    # clause obligations, where the successor kind "weak-static" means:
    # same kind as the requiring triple (plumbing marker resolved below)

    def _succ_node(self, kind: str, ref) -> tuple:
        skind, psi, p, q = ref
        if skind == "weak-static":
            skind = kind
        return (skind, psi, canonical_form(p), canonical_form(q))

    # greatest fixpoint

    def solve(self, kind: str, psi, p: Agent, q: Agent):
        """Explore from the root triple and refine; returns (good, nodes, root).

        ``nodes`` maps node keys to (kind, psi, p, q, reqs) with successor
        references resolved to node keys.
        """
        root = (kind, psi, canonical_form(p), canonical_form(q))
        nodes, order = {}, []
        key = lambda n: repr(alpha_canonical(n))
        rootk = key(root)
        frontier = [(rootk, root)]
        pending = {rootk}
        while frontier:
            nk, node = frontier.pop(0)
            pending.discard(nk)
            if nk in nodes:
                continue
            if len(nodes) >= self.cfg.state_budget:
                raise BudgetExceeded(f"triple budget {self.cfg.state_budget} exceeded")
            nkind, npsi, np_, nq = node
            if repr(alpha_canonical(np_)) == repr(alpha_canonical(nq)):
                nodes[nk] = (node, None)  # identical sides: good axiomatically
                order.append(nk)
                continue
            resolved = []
            for mode, clause, *rest in self.requirements(nkind, npsi, np_, nq):
                if mode == _FACT:
                    resolved.append((mode, clause, rest[0], rest[1]))
                    continue
                succ, detail = rest if len(rest) == 2 else (rest[0], "")
                links, linked = [], set()
                for ref, note in succ:
                    child = self._succ_node(nkind, ref)
                    ck = key(child)
                    if ck in linked:
                        continue
                    linked.add(ck)
                    links.append((ck, note))
                    if ck not in nodes and ck not in pending:
                        pending.add(ck)
                        frontier.append((ck, child))
                resolved.append((mode, clause, links, detail))
            nodes[nk] = (node, resolved)
            order.append(nk)

        bad, watchers = {}, {}
        queue = []
        for nk in order:
            _, reqs = nodes[nk]
            if reqs is None:
                continue
            for i, (mode, clause, payload, detail) in enumerate(reqs):
                if mode == _FACT:
                    if not payload and nk not in bad:
                        bad[nk] = (clause, detail)
                        queue.append(nk)
                elif mode == _ALL:
                    for ck, note in payload:
                        watchers.setdefault(ck, []).append((nk, i, _ALL))
                else:
                    if not payload and nk not in bad:
                        bad[nk] = (clause, detail + ": no matching move")
                        queue.append(nk)
                    for ck, note in payload:
                        watchers.setdefault(ck, []).append((nk, i, _ANY))
        alive = {}
        for nk in order:
            _, reqs = nodes[nk]
            if reqs is None:
                continue
            for i, (mode, clause, payload, detail) in enumerate(reqs):
                if mode == _ANY:
                    alive[nk, i] = len(payload)
        while queue:
            ck = queue.pop(0)
            for nk, i, mode in watchers.get(ck, ()):
                if nk in bad:
                    continue
                _, reqs = nodes[nk]
                mode_, clause, payload, detail = reqs[i]
                if mode == _ALL:
                    bad[nk] = (clause, detail)
                    queue.append(nk)
                else:
                    alive[nk, i] -= 1
                    if alive[nk, i] == 0:
                        bad[nk] = (clause, detail + ": every answer fails")
                        queue.append(nk)
        return bad, nodes, rootk

    def evidence(self, bad, nodes, nk, depth: int = 12) -> tuple:
        """Alternating challenge/failure trace from a bad node."""
        node, reqs = nodes[nk]
        clause, detail = bad[nk]
        if depth <= 0:
            return ((clause, "trace truncated"),)
        for mode, rclause, payload, rdetail in reqs or ():
            if rclause != clause:
                continue
            if mode == _FACT and not payload:
                return ((clause, rdetail),)
            if mode == _ANY and (not payload or all(ck in bad for ck, _ in payload)):
                entry = (clause, rdetail if payload else rdetail + ": no matching move")
                if not payload:
                    return (entry,)
                ck, note = payload[0]
                return (entry,) + self.evidence(bad, nodes, ck, depth - 1)
            if mode == _ALL and any(ck in bad for ck, _ in payload):
                ck, note = next((c, n) for c, n in payload if c in bad)
                return ((clause, note),) + self.evidence(bad, nodes, ck, depth - 1)
        return ((clause, detail),)


def _run_game(inst: InstanceDefinition, psi, p: Agent, q: Agent,
              cfg: EquivConfig | None, kind: str) -> Verdict:
    game = _Game(inst, cfg)
    try:
        bad, nodes, rootk = game.solve(kind, psi, p, q)
    except BudgetExceeded as exc:
        return Verdict("inconclusive", reason=str(exc))
    if rootk in bad:
        return Verdict("distinguished",
                       evidence=game.evidence(bad, nodes, rootk))
    triples = tuple((npsi, np_, nq) for nk in nodes
                    for (nkind, npsi, np_, nq), _ in (nodes[nk],)
                    if nk not in bad and nkind == kind)
    witness = CandidateRelation(triples)
    report = check_candidate_relation(inst, witness, kind, cfg)
    if not report.ok:  # pragma: no cover - soundness guard
        raise RuntimeError(
            f"internal: witness failed its own certification: {report}")
    return Verdict("bisimilar", witness=witness)


def strong_bisim(inst: InstanceDefinition, psi, p: Agent, q: Agent,
                 cfg: EquivConfig | None = None) -> Verdict:
    """Greatest-fixpoint strong bisimilarity check with certified witness."""
    return _run_game(inst, psi, p, q, cfg, "strong")


def weak_bisim(inst: InstanceDefinition, psi, p: Agent, q: Agent,
               cfg: EquivConfig | None = None) -> Verdict:
    """Weak bisimilarity: tau moves are answered silently."""
    return _run_game(inst, psi, p, q, cfg, "weak")


def weak_tau_bisim(inst: InstanceDefinition, psi, p: Agent, q: Agent,
                   cfg: EquivConfig | None = None) -> Verdict:
    """Weak bisimilarity whose tau challenges need at least one tau answer."""
    return _run_game(inst, psi, p, q, cfg, "weak-tau")


# -- certification ------------------------------------------------------------------


def check_candidate_relation(inst: InstanceDefinition, rel: CandidateRelation,
                             kind: str = "strong",
                             cfg: EquivConfig | None = None) -> CheckReport:
    """Verify every clause of the chosen bisimulation kind for every triple.

    Successor obligations are discharged by membership in ``rel`` (up to
    alpha and the structural laws) or by the two sides of the successor
    coinciding outright.  The weak-tau kind's tau clause demands weak
    bisimilarity of the continuations; a successor outside ``rel`` is
    then settled by a nested weak check.
    """
    if kind not in ("strong", "weak", "weak-tau"):
        raise ValueError(f"unknown bisimulation kind {kind!r}")
    game = _Game(inst, cfg)
    keys = rel.keys()

    def settled(ref) -> bool:
        skind, psi, p, q = ref
        pc, qc = canonical_form(p), canonical_form(q)
        if repr(alpha_canonical(pc)) == repr(alpha_canonical(qc)):
            return True
        if _triple_key(psi, pc, qc) in keys:
            return True
        if skind == "weak" and kind == "weak-tau":
            return bool(weak_bisim(inst, psi, pc, qc, cfg))
        return False

    for psi, p, q in rel.triples:
        if repr(alpha_canonical(canonical_form(p))) == repr(
                alpha_canonical(canonical_form(q))):
            continue
        try:
            reqs = game.requirements(kind, psi, p, q)
        except BudgetExceeded as exc:
            return CheckReport(False, "budget", (psi, p, q), str(exc))
        for mode, clause, *rest in reqs:
            if mode == _FACT:
                ok, detail = rest
                if not ok:
                    return CheckReport(False, clause, (psi, p, q), detail)
                continue
            succ, detail = rest if len(rest) == 2 else (rest[0], "")
            if mode == _ALL:
                for ref, note in succ:
                    if not settled(ref):
                        return CheckReport(False, clause, (psi, p, q),
                                           f"{detail or note}: successor missing")
            else:
                if not any(settled(ref) for ref, note in succ):
                    return CheckReport(
                        False, clause, (psi, p, q),
                        f"{detail}: no answer stays in the relation")
    return CheckReport(True)


# -- congruence closure --------------------------------------------------------------


_CHECKERS = {"strong": strong_bisim, "weak": weak_bisim, "weak-tau": weak_tau_bisim}


def congruence_closure_check(inst: InstanceDefinition, psi, p: Agent, q: Agent,
                             cfg: EquivConfig | None = None,
                             kind: str = "strong") -> Verdict:
    """Run the kind's checker on every sampled substitution instance.

    Bisimilar only if the plain pair and every substituted pair pass;
    sample-complete only, as the sequences come from the configuration.
    """
    cfg = cfg or EquivConfig()
    checker = _CHECKERS[kind]
    sequences = ((),) + tuple(cfg.substitution_samples)
    witness = []
    for i, seq in enumerate(sequences):
        ps, qs = p, q
        for sub in seq:
            ps = substitute_agent(inst, ps, sub)
            qs = substitute_agent(inst, qs, sub)
        verdict = checker(inst, psi, ps, qs, cfg)
        if verdict.result == "distinguished":
            note = ("original pair" if not seq
                    else f"substitution sequence {i - 1}: {seq!r}")
            return Verdict("distinguished",
                           evidence=((kind, note),) + verdict.evidence)
        if verdict.result == "inconclusive":
            return verdict
        witness.extend(verdict.witness.triples)
    return Verdict("bisimilar", witness=CandidateRelation(tuple(witness)))
