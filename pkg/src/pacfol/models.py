"""Total and partial models over ground atoms.

A :class:`WorldModel` stores finitely many atom values plus a default for
every other atom. A :class:`PartialModel` stores the observed atoms; all
others are unknown (``*``). Witnessing is three-valued evaluation against a
partial model, and restriction substitutes observed atoms by constants.
"""

from __future__ import annotations

import enum
import json
from typing import Iterable, Iterator, Mapping, NamedTuple

from .grounding import bindings, eval_guard, ground_body
from .parser import parse_atom
from .syntax import (
    FALSE, TRUE, And, Atom, Const, ForallClause, Formula, Implies, Literal, Name,
    Not, Or, fold_constants, names_of,
)


class TruthValue3(enum.Enum):
    TRUE = 1
    FALSE = 0
    UNKNOWN = 2

    @classmethod
    def of(cls, value: bool | None) -> "TruthValue3":
        if value is None:
            return cls.UNKNOWN
        return cls.TRUE if value else cls.FALSE

    def negate(self) -> "TruthValue3":
        if self is TruthValue3.TRUE:
            return TruthValue3.FALSE
        if self is TruthValue3.FALSE:
            return TruthValue3.TRUE
        return self


def _bit(key: str, v) -> bool:
    if v not in (0, 1) or isinstance(v, float):
        raise ValueError(f"value for {key} must be 0 or 1, got {v!r}")
    return bool(v)


class WorldModel:
    """A total {0,1} assignment represented by finite overrides and a default."""

    __slots__ = ("assignment", "default")

    def __init__(self, assignment: Mapping[Atom, bool] | None = None, default: bool = False):
        self.assignment = {a: bool(v) for a, v in (assignment or {}).items()}
        for a in self.assignment:
            if not a.is_ground:
                raise ValueError(f"world model key {a} is not ground")
        self.default = bool(default)

    def __getitem__(self, atom: Atom) -> bool:
        return self.assignment.get(atom, self.default)

    def __eq__(self, other) -> bool:
        return (isinstance(other, WorldModel) and self.default == other.default
                and self.assignment == other.assignment)

    def __repr__(self) -> str:
        return f"WorldModel({len(self.assignment)} atoms, default={int(self.default)})"

    @property
    def atoms(self) -> frozenset[Atom]:
        return frozenset(self.assignment)

    def names(self) -> frozenset[Name]:
        return frozenset(n for a in self.assignment for n in names_of(a))

    def to_json(self) -> dict:
        out = {str(a): int(v) for a, v in sorted(self.assignment.items())}
        out["_default"] = int(self.default)
        return out

    @classmethod
    def from_json(cls, obj: Mapping[str, int]) -> "WorldModel":
        default = _bit("_default", obj.get("_default", 0))
        return cls({parse_atom(k): _bit(k, v) for k, v in obj.items() if k != "_default"}, default)


class PartialModel:
    """A map from ground atoms to {1, 0, *}; unlisted atoms are unknown."""

    __slots__ = ("observed", "_names")

    def __init__(self, observed: Mapping[Atom, bool] | None = None):
        self.observed = {a: bool(v) for a, v in (observed or {}).items()}
        for a in self.observed:
            if not a.is_ground:
                raise ValueError(f"partial model key {a} is not ground")
        self._names: frozenset[Name] | None = None

    def get(self, atom: Atom) -> bool | None:
        return self.observed.get(atom)

    def __len__(self) -> int:
        return len(self.observed)

    def __eq__(self, other) -> bool:
        return isinstance(other, PartialModel) and self.observed == other.observed

    def __repr__(self) -> str:
        return f"PartialModel({len(self.observed)} observed)"

    def names(self) -> frozenset[Name]:
        """Names occurring in observed atoms."""
        if self._names is None:
            self._names = frozenset(n for a in self.observed for n in names_of(a))
        return self._names

    def to_json(self) -> dict:
        return {str(a): int(v) for a, v in sorted(self.observed.items())}

    @classmethod
    def from_json(cls, obj: Mapping[str, int]) -> "PartialModel":
        return cls({parse_atom(k): _bit(k, v) for k, v in obj.items()})


def consistent(n: PartialModel, m: WorldModel) -> bool:
    return all(m[a] == v for a, v in n.observed.items())


def evaluate(phi: Formula, m: WorldModel) -> bool:
    """Classical truth of a ground formula in a world."""
    if isinstance(phi, Atom):
        return m[phi]
    if isinstance(phi, Const):
        return phi.value
    if isinstance(phi, Not):
        return not evaluate(phi.arg, m)
    if isinstance(phi, And):
        return evaluate(phi.left, m) and evaluate(phi.right, m)
    if isinstance(phi, Or):
        return evaluate(phi.left, m) or evaluate(phi.right, m)
    if isinstance(phi, Implies):
        return (not evaluate(phi.left, m)) or evaluate(phi.right, m)
    raise TypeError(f"cannot evaluate {phi!r}")


def evaluate_clause(clause: Iterable[Literal], m: WorldModel) -> bool:
    return any(m[lit.atom] == lit.positive for lit in clause)


_T, _F, _U = TruthValue3.TRUE, TruthValue3.FALSE, TruthValue3.UNKNOWN


def witness_eval(phi: Formula, n: PartialModel) -> TruthValue3:
    """Three-valued witnessing: TRUE/FALSE only when ``n`` certifies it."""
    if isinstance(phi, Atom):
        return TruthValue3.of(n.get(phi))
    if isinstance(phi, Const):
        return _T if phi.value else _F
    if isinstance(phi, Not):
        return witness_eval(phi.arg, n).negate()
    if isinstance(phi, Or):
        a, b = witness_eval(phi.left, n), witness_eval(phi.right, n)
        if a is _T or b is _T:
            return _T
        return _F if a is _F and b is _F else _U
    if isinstance(phi, And):
        a, b = witness_eval(phi.left, n), witness_eval(phi.right, n)
        if a is _F or b is _F:
            return _F
        return _T if a is _T and b is _T else _U
    if isinstance(phi, Implies):
        a, b = witness_eval(phi.left, n), witness_eval(phi.right, n)
        if a is _F or b is _T:
            return _T
        return _F if a is _T and b is _F else _U
    raise TypeError(f"cannot witness {phi!r}")


def literal_value(lit: Literal, n: PartialModel) -> bool | None:
    v = n.get(lit.atom)
    return None if v is None else v == lit.positive


def clause_witnessed_true(clause: Iterable[Literal], n: PartialModel) -> bool:
    return any(literal_value(lit, n) is True for lit in clause)


def witness_forall(clause: ForallClause, n: PartialModel, names: Iterable[Name]) -> bool:
    """Whether every guard-passing binding of ``clause`` over ``names`` is witnessed true.

    Bindings whose guard fails are vacuously satisfied.
    """
    pool = list(names)
    if clause.vars and not pool:
        raise ValueError("witness_forall needs a nonempty name set for a quantified clause")
    for theta in bindings(clause.vars, pool):
        if eval_guard(clause.guard, theta) and not clause_witnessed_true(ground_body(clause, theta), n):
            return False
    return True


def restrict(phi: Formula, n: PartialModel, fold: bool = True) -> Formula:
    """phi|_N: observed atoms become constants, then (by default) constants fold."""
    out = _restrict(phi, n)
    return fold_constants(out) if fold else out


def _restrict(phi: Formula, n: PartialModel) -> Formula:
    if isinstance(phi, Atom):
        v = n.get(phi)
        return phi if v is None else (TRUE if v else FALSE)
    if isinstance(phi, Not):
        return Not(_restrict(phi.arg, n))
    if isinstance(phi, (And, Or, Implies)):
        return type(phi)(_restrict(phi.left, n), _restrict(phi.right, n))
    return phi


class RestrictedClauses(NamedTuple):
    clauses: list[frozenset]
    falsum: bool


def restrict_clause(clause: frozenset, n: PartialModel) -> frozenset | None:
    """Restrict one ground clause; ``None`` means it was witnessed true."""
    keep = []
    for lit in clause:
        v = literal_value(lit, n)
        if v is True:
            return None
        if v is None:
            keep.append(lit)
    return frozenset(keep) if len(keep) != len(clause) else clause


def restrict_clauses(clauses: Iterable[frozenset], n: PartialModel) -> RestrictedClauses:
    """S|_N for a clause set: satisfied clauses vanish, falsified literals drop."""
    out: dict[frozenset, None] = {}
    falsum = False
    for c in clauses:
        r = restrict_clause(c, n)
        if r is None:
            continue
        if not r:
            falsum = True
        out[r] = None
    return RestrictedClauses(list(out), falsum)


def load_partial_models(lines: Iterable[str]) -> list[PartialModel]:
    """One JSON object per non-blank line, e.g. ``{"Grad(logan)": 1}``."""
    return [PartialModel.from_json(json.loads(line)) for line in lines if line.strip()]


def dump_partial_models(models: Iterable[PartialModel]) -> Iterator[str]:
    for m in models:
        yield json.dumps(m.to_json(), sort_keys=True)


def load_world_models(lines: Iterable[str]) -> list[WorldModel]:
    return [WorldModel.from_json(json.loads(line)) for line in lines if line.strip()]
