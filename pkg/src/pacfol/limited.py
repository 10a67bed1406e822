"""Level-z limited-belief entailment over ground clause sets.

``s |=_z phi`` holds when phi is a weakening of some clause in the unit
propagation closure of s (subsume), or, for z > 0, when some clause c of s
can be split so that every ``s + {l}`` with l in c entails phi at level z-1.

The closure is represented in *reduced* form: the set of derived unit
literals plus each clause with its falsified literals removed. Every clause
the literal fixpoint would contain is a superset of one of these, so
subsumption answers are identical while the representation stays linear in
the size of s.
"""

from __future__ import annotations

from collections import defaultdict
from typing import Iterable

from .sat import CNFBudgetError, DEFAULT_DIRECT_LIMIT, cnf_direct
from .syntax import Formula, Literal, format_clause


class ClauseStore:
    """An immutable, duplicate-free set of ground clauses indexed by literal."""

    __slots__ = ("clauses", "index", "falsum", "units")

    def __init__(self, clauses: Iterable[Iterable[Literal]] = (), falsum: bool = False):
        cs = frozenset(frozenset(c) for c in clauses)
        self.clauses: frozenset[frozenset] = cs
        self.falsum = falsum or frozenset() in cs
        index: dict[Literal, list[frozenset]] = defaultdict(list)
        for c in cs:
            for lit in c:
                index[lit].append(c)
        self.index = dict(index)
        self.units = frozenset(next(iter(c)) for c in cs if len(c) == 1)

    def __contains__(self, clause) -> bool:
        return frozenset(clause) in self.clauses

    def __iter__(self):
        return iter(self.clauses)

    def __len__(self) -> int:
        return len(self.clauses)

    def __eq__(self, other) -> bool:
        return (isinstance(other, ClauseStore) and self.clauses == other.clauses
                and self.falsum == other.falsum)

    def __hash__(self) -> int:
        return hash((self.clauses, self.falsum))

    def __repr__(self) -> str:
        return f"ClauseStore({len(self.clauses)} clauses{', falsum' if self.falsum else ''})"

    def with_units(self, lits: Iterable[Literal]) -> "ClauseStore":
        return ClauseStore(self.clauses | {frozenset((l,)) for l in lits}, self.falsum)


def _as_store(s) -> ClauseStore:
    return s if isinstance(s, ClauseStore) else ClauseStore(s)


def _propagate(clauses: Iterable[frozenset], index: dict, seed: Iterable[Literal]):
    """Unit-closure of ``seed`` plus the unit clauses. Returns (units, falsum)."""
    units: set[Literal] = set()
    queue = list(seed)
    queue.extend(next(iter(c)) for c in clauses if len(c) == 1)
    if any(len(c) == 0 for c in clauses):
        return frozenset(queue), True
    remaining = {c: len(c) for c in clauses}
    while queue:
        lit = queue.pop()
        if lit in units:
            continue
        if lit.negate() in units:
            return frozenset(units | {lit}), True
        units.add(lit)
        for c in index.get(lit.negate(), ()):
            remaining[c] -= 1
            left = remaining[c]
            if left == 0:
                return frozenset(units), True
            if left == 1:
                for m in c:
                    if m.negate() not in units:
                        if m not in units:
                            queue.append(m)
                        break
    return frozenset(units), False


def _reduced(c: frozenset, units: frozenset) -> frozenset:
    return frozenset(m for m in c if m.negate() not in units)


def up_closure(s) -> ClauseStore:
    """U(s) in reduced form (see module docstring); sets falsum on contradiction."""
    s = _as_store(s)
    units, falsum = _propagate(s.clauses, s.index, ())
    if falsum or s.falsum:
        return ClauseStore(s.clauses | {frozenset()}, True)
    derived = {_reduced(c, units) for c in s.clauses}
    derived.update(frozenset((u,)) for u in units)
    return ClauseStore(s.clauses | derived)


def subsumed(phi: Iterable[Literal], u: ClauseStore) -> bool:
    """Whether phi is in V(u): falsum, or some clause of u is a subset of phi."""
    if u.falsum:
        return True
    phi = frozenset(phi)
    for lit in phi:
        for c in u.index.get(lit, ()):
            if c <= phi:
                return True
    return False


class _Reasoner:
    """Memoised level-z search for one (s, phi) pair.

    States are identified by the unit closure they induce: splits only add
    unit clauses, so the non-unit clauses of every branch store are those of
    the original s.
    """

    def __init__(self, s: ClauseStore, phi: frozenset):
        self.s = s
        self.phi = phi
        self.base = [c for c in s.clauses if len(c) >= 2]
        self.proven: dict[frozenset, int] = {}   # units -> least z known to succeed
        self.refuted: dict[frozenset, int] = {}  # units -> greatest z known to fail
        self.closures: dict[frozenset, tuple[frozenset, bool]] = {}

    def close(self, seed: frozenset) -> tuple[frozenset, bool]:
        hit = self.closures.get(seed)
        if hit is None:
            hit = _propagate(self.s.clauses, self.s.index, seed)
            self.closures[seed] = hit
        return hit

    def base_check(self, units: frozenset) -> bool:
        if any(l in units for l in self.phi):
            return True
        for lit in self.phi:
            for c in self.s.index.get(lit, ()):
                if all(m in self.phi or m.negate() in units for m in c):
                    return True
        return False

    def splits(self, units: frozenset) -> list[list[Literal]]:
        """Open clauses of s as branch literal lists, smallest first.

        Clauses already satisfied by the closure or reduced to a unit are
        skipped: their splits can only reproduce the current state. Branch
        literals falsified by the closure are dropped because adding them
        yields falsum, which entails anything.
        """
        out = []
        for c in self.base:
            if any(l in units for l in c):
                continue
            lits = [l for l in c if l.negate() not in units]
            if len(lits) >= 2:
                out.append(sorted(lits))
        out.sort(key=lambda ls: (len(ls), format_clause(ls)))
        return out

    def entails(self, units: frozenset, z: int) -> bool:
        if self.base_check(units):
            return True
        if z == 0:
            return False
        if self.proven.get(units, z + 1) <= z:
            return True
        if self.refuted.get(units, -1) >= z:
            return False
        for lits in self.splits(units):
            if all(self._branch(units, l, z - 1) for l in lits):
                self.proven[units] = min(z, self.proven.get(units, z))
                return True
        self.refuted[units] = max(z, self.refuted.get(units, z))
        return False

    def _branch(self, units: frozenset, lit: Literal, z: int) -> bool:
        new_units, falsum = self.close(units | {lit})
        return falsum or self.entails(new_units, z)

    def run(self, z: int) -> bool:
        if self.s.falsum:
            return True
        units, falsum = self.close(frozenset())
        return falsum or self.entails(units, z)


def entails_z(s, phi: Iterable[Literal], z: int) -> bool:
    """``s |=_z phi`` for a ground clause phi and z >= 0."""
    if z < 0:
        raise ValueError("z must be nonnegative")
    return _Reasoner(_as_store(s), frozenset(phi)).run(z)


def minimal_level(s, phi: Iterable[Literal], z_max: int) -> int | None:
    """Least z <= z_max with ``s |=_z phi``, or None."""
    store, clause = _as_store(s), frozenset(phi)
    reasoner = _Reasoner(store, clause)
    for z in range(z_max + 1):
        if reasoner.run(z):
            return z
    return None


def entails_z_formula(s, phi: Formula, z: int, atom_limit: int = DEFAULT_DIRECT_LIMIT) -> bool:
    """Lift ``|=_z`` to ground formulas conjunct-wise over an equivalent CNF.

    Raises CNFBudgetError if phi has more than ``atom_limit`` atoms.
    Tautological conjuncts are discharged during CNF conversion.
    """
    clauses = cnf_direct(phi, atom_limit)
    store = _as_store(s)
    return all(entails_z(store, c, z) for c in clauses)


__all__ = [
    "ClauseStore", "CNFBudgetError", "up_closure", "subsumed", "entails_z",
    "entails_z_formula", "minimal_level",
]
