"""Ready-made calculus instances.

``builtin_instance(id)`` returns a fresh ``InstanceDefinition`` for one of
the shipped calculi.  Parametric ids take arguments in parentheses, e.g.
``sortedppi(chan=data data,data=)``: each entry gives one channel sort the
space-separated sequence of object sorts it carries.
"""

from __future__ import annotations

from ..instance import InstanceDefinition
from .algebra import peano_instance, symspi_instance
from .dy import KnowledgeSet, dy_derivable, pmspi_binders, pmspi_substitute
from .ndlam import ndlam_instance, ndlam_normal_forms
from .pmspi import pmspi_instance
from .ppi import (DEFAULT_SORTEDPPI_OB, linda_instance, ppi_instance,
                  pspi_instance, sortedppi_instance)
from .vpccs import vpccs_eval, vpccs_instance, vppi_instance

__all__ = [
    "KnowledgeSet",
    "builtin_instance",
    "dy_derivable",
    "instance_ids",
    "linda_instance",
    "ndlam_instance",
    "ndlam_normal_forms",
    "peano_instance",
    "pmspi_binders",
    "pmspi_instance",
    "pmspi_substitute",
    "ppi_instance",
    "pspi_instance",
    "sortedppi_instance",
    "symspi_instance",
    "vpccs_eval",
    "vpccs_instance",
    "vppi_instance",
]


def _sortedppi_from_args(args: str) -> InstanceDefinition:
    ob = {}
    for entry in filter(None, (e.strip() for e in args.split(","))):
        key, eq, seq = entry.partition("=")
        if not eq:
            raise ValueError(f"bad sortedppi entry {entry!r}; want sort=objsorts")
        ob[key.strip()] = tuple(seq.split())
    return sortedppi_instance(ob)


_PLAIN = {
    "ppi": ppi_instance,
    "linda": linda_instance,
    "pspi": pspi_instance,
    "sortedppi": lambda: sortedppi_instance(DEFAULT_SORTEDPPI_OB),
    "peano": peano_instance,
    "symspi": symspi_instance,
    "pmspi": pmspi_instance,
    "ndlam": ndlam_instance,
    "vpccs": vpccs_instance,
    "vppi": vppi_instance,
}

_PARAMETRIC = {
    "sortedppi": _sortedppi_from_args,
}


def instance_ids() -> tuple:
    """Identifiers accepted by ``builtin_instance``, parameterless forms."""
    return tuple(sorted(_PLAIN))


def builtin_instance(ident: str) -> InstanceDefinition:
    ident = ident.strip()
    if "(" in ident and ident.endswith(")"):
        head, _, rest = ident.partition("(")
        head = head.strip()
        if head not in _PARAMETRIC:
            raise KeyError(f"unknown parametric instance {head!r}")
        return _PARAMETRIC[head](rest[:-1])
    if ident not in _PLAIN:
        known = ", ".join(instance_ids())
        raise KeyError(f"unknown instance {ident!r}; known: {known}")
    return _PLAIN[ident]()
