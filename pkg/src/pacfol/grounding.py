"""Substitution, guard evaluation and finite-universe grounding of proper+ KBs."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Mapping

from .syntax import (
    And, Const, Eq, ForallClause, Formula, Implies, LogicError, Name, Not, Or,
    ProperPlusKB, Var, canonical_clauses, names_of,
)

FRESH_PREFIX = "_f"


class UnboundVariableError(LogicError):
    pass


def eval_guard(e: Formula, theta: Mapping[Var, Name]) -> bool:
    """Truth of a guard under a substitution; ``x = a`` holds iff theta(x) is a."""
    if isinstance(e, Eq):
        try:
            return theta[e.var] == e.name
        except KeyError:
            raise UnboundVariableError(f"variable {e.var} is not bound") from None
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Not):
        return not eval_guard(e.arg, theta)
    if isinstance(e, And):
        return eval_guard(e.left, theta) and eval_guard(e.right, theta)
    if isinstance(e, Or):
        return eval_guard(e.left, theta) or eval_guard(e.right, theta)
    if isinstance(e, Implies):
        return (not eval_guard(e.left, theta)) or eval_guard(e.right, theta)
    raise TypeError(f"not a guard formula: {e!r}")


def ground_body(clause: ForallClause, theta: Mapping[Var, Name]) -> frozenset:
    """The body of ``clause`` under ``theta`` as a ground clause."""
    out = []
    for lit in clause.body:
        atom = lit.atom.substitute(theta)
        if not atom.is_ground:
            raise UnboundVariableError(f"substitution leaves {atom} non-ground")
        out.append(lit if atom is lit.atom else type(lit)(atom, lit.positive))
    return frozenset(out)


def bindings(variables: tuple[Var, ...], universe: Iterable[Name]):
    """All maps from ``variables`` into ``universe``; names may repeat."""
    pool = sorted(set(universe))
    for combo in product(pool, repeat=len(variables)):
        yield dict(zip(variables, combo))


def ground_clause(clause: ForallClause, universe: Iterable[Name]) -> list[frozenset]:
    """Guard-passing instances of one clause over ``universe``."""
    vs = clause.vars
    return [ground_body(clause, theta) for theta in bindings(vs, universe)
            if eval_guard(clause.guard, theta)]


def gnd_with_names(kb: ProperPlusKB, names: Iterable[Name]) -> list[frozenset]:
    """GND(kb, C): groundings over names_of(kb) plus ``names``, canonically ordered."""
    universe = set(names_of(kb)) | set(names)
    out: set[frozenset] = set()
    for clause in kb.clauses:
        out.update(ground_clause(clause, universe))
    return canonical_clauses(out)


def fresh_names(avoid: Iterable[Name], count: int, prefix: str = FRESH_PREFIX) -> list[Name]:
    """``count`` deterministic names ``_f1, _f2, ...`` skipping any in ``avoid``."""
    taken = {n.token for n in avoid}
    out: list[Name] = []
    i = 1
    while len(out) < count:
        tok = f"{prefix}{i}"
        if tok not in taken:
            out.append(Name(tok))
        i += 1
    return out


def gnd_z(kb: ProperPlusKB, z: int) -> list[frozenset]:
    """GND(kb, z): ground over the KB's names plus ``z`` new ones."""
    return gnd_with_names(kb, fresh_names(names_of(kb), z))


@dataclass(frozen=True)
class GroundTask:
    """The propositional instance GND^-(kb & !query)."""

    kb_clauses: tuple[frozenset, ...]
    negated_query: Formula
    name_universe: frozenset[Name]
    fresh: tuple[Name, ...] = ()


def gnd_minus(kb: ProperPlusKB, query: Formula, fresh_prefix: str = FRESH_PREFIX,
              extra: int | None = None) -> GroundTask:
    """Ground kb over the names of kb and query plus rank(kb) (or ``extra``) fresh names."""
    mentioned = set(names_of(kb)) | set(names_of(query))
    fresh = fresh_names(mentioned, kb.rank if extra is None else extra, fresh_prefix)
    universe = frozenset(mentioned | set(fresh))
    clauses = gnd_with_names(kb, universe)
    return GroundTask(tuple(clauses), Not(query), universe, tuple(fresh))
