"""Rewrite-generated calculi: natural-number arithmetic and symmetric-key
cryptography.

Both are built by ``build_rewrite_instance``; the files below are the whole
definition.  For the crypto calculus the pattern binders additionally avoid
key positions of ``enc``, so a received ciphertext can bind its payload but
never its key.
"""

from __future__ import annotations

from ..names import Name
from ..rewrite import build_rewrite_instance, parse_rule_file
from ..terms import Func

PEANO_RULES = """
sort nat
sort chan
cons zero : nat
cons succ : nat -> nat
defn plus : nat nat -> nat
rule plus(K, zero) -> K              -- add nothing
rule plus(K, succ(M)) -> plus(succ(K), M)   -- shift one successor left
"""

SYMSPI_RULES = """
sort message
sort key
cons enc : message key -> message
defn dec : message key -> message
rule dec(enc(M, K), K) -> M
"""


def peano_instance():
    sig, rules = parse_rule_file(PEANO_RULES)
    return build_rewrite_instance(
        sig, rules, name="peano", numeral=("zero", "succ"),
        about="naturals with tail-recursive addition; literals n sugar succ^n(zero)")


def _enc_key_names(pattern) -> set:
    """Names with any occurrence in a key position of ``enc``."""
    out: set = set()

    def walk(t, in_key: bool):
        if isinstance(t, Name):
            if in_key:
                out.add(t)
            return
        if isinstance(t, Func) and t.symbol == "enc":
            walk(t.args[0], in_key)
            walk(t.args[1], True)
            return
        for a in getattr(t, "args", ()):
            walk(a, in_key)

    walk(pattern, False)
    return out


def symspi_instance():
    sig, rules = parse_rule_file(SYMSPI_RULES)
    return build_rewrite_instance(
        sig, rules, extra_binder_filter=_enc_key_names, name="symspi",
        about="symmetric encryption; receiving enc(x,k) can bind x but not k")
