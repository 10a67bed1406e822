"""Abstract syntax for proper+ knowledge bases and ground queries.

Terms are either :class:`Name` (rigid designators, unique-name assumption) or
:class:`Var`. Ground query formulas and equality guards share one small set
of connective nodes (:class:`Not`, :class:`And`, :class:`Or`,
:class:`Implies`, :class:`Const`); the leaves differ (:class:`Atom` for
queries, :class:`Eq` for guards).

Every node is an immutable, hashable dataclass, so structural equality is
plain ``==``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import singledispatch
from typing import Iterable, Iterator, Union


class LogicError(ValueError):
    """Base class for malformed input to the reasoning engine."""


class ValidationError(LogicError):
    """A well-formedness condition on a KB or query does not hold."""


@dataclass(frozen=True, slots=True)
class Name:
    token: str

    def __str__(self) -> str:
        return self.token

    @property
    def sort_key(self) -> tuple:
        # numerals sort numerically and before symbolic names
        if self.token.isdigit():
            return (0, int(self.token), self.token)
        return (1, 0, self.token)

    def __lt__(self, other: "Name") -> bool:
        return self.sort_key < other.sort_key


@dataclass(frozen=True, slots=True)
class Var:
    token: str

    def __str__(self) -> str:
        return self.token

    def __lt__(self, other: "Var") -> bool:
        return self.token < other.token


Term = Union[Name, Var]


@dataclass(frozen=True, slots=True)
class Atom:
    predicate: str
    args: tuple[Term, ...] = ()

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def is_ground(self) -> bool:
        return all(isinstance(a, Name) for a in self.args)

    @property
    def sort_key(self) -> tuple:
        return (self.predicate, len(self.args),
                tuple(a.sort_key if isinstance(a, Name) else (2, 0, a.token) for a in self.args))

    def __lt__(self, other: "Atom") -> bool:
        return self.sort_key < other.sort_key

    def substitute(self, theta: dict) -> "Atom":
        if not self.args:
            return self
        return Atom(self.predicate, tuple(theta.get(a, a) if isinstance(a, Var) else a for a in self.args))

    def __str__(self) -> str:
        if not self.args:
            return self.predicate
        return f"{self.predicate}({','.join(str(a) for a in self.args)})"


@dataclass(frozen=True, slots=True)
class Literal:
    atom: Atom
    positive: bool = True

    def negate(self) -> "Literal":
        return Literal(self.atom, not self.positive)

    @property
    def sort_key(self) -> tuple:
        return (self.atom.sort_key, not self.positive)

    def __lt__(self, other: "Literal") -> bool:
        return self.sort_key < other.sort_key

    def __str__(self) -> str:
        return str(self.atom) if self.positive else f"!{self.atom}"


# --- formula connectives -------------------------------------------------

@dataclass(frozen=True, slots=True)
class Const:
    value: bool

    def __str__(self) -> str:
        return "true" if self.value else "false"


TRUE = Const(True)
FALSE = Const(False)


@dataclass(frozen=True, slots=True)
class Eq:
    """Acceptable equality ``var = name``; only valid inside guards."""

    var: Var
    name: Name

    def __str__(self) -> str:
        return f"{self.var} = {self.name}"


@dataclass(frozen=True, slots=True)
class Not:
    arg: "Formula"

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True, slots=True)
class And:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True, slots=True)
class Or:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True, slots=True)
class Implies:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return format_formula(self)


Formula = Union[Atom, Const, Eq, Not, And, Or, Implies]
GroundFormula = Formula
GroundClause = frozenset  # frozenset[Literal] of ground literals; empty = falsum


@dataclass(frozen=True)
class ForallClause:
    """The universal closure of ``guard => body`` (body a disjunction of literals)."""

    guard: Formula
    body: tuple[Literal, ...]

    @property
    def vars(self) -> tuple[Var, ...]:
        found = set(_guard_vars(self.guard))
        for lit in self.body:
            found.update(a for a in lit.atom.args if isinstance(a, Var))
        return tuple(sorted(found))

    @property
    def rank(self) -> int:
        return len(self.vars)

    def __str__(self) -> str:
        head = "forall " + ",".join(str(v) for v in self.vars) if self.vars else "forall "
        body = " | ".join(str(lit) for lit in self.body)
        if self.guard == TRUE:
            return f"{head}: {body}"
        return f"{head}: {format_formula(self.guard)} => {body}"


@dataclass(frozen=True)
class ProperPlusKB:
    clauses: tuple[ForallClause, ...]

    def __post_init__(self):
        if not self.clauses:
            raise ValidationError("a proper+ KB needs at least one clause")

    @property
    def rank(self) -> int:
        return max(c.rank for c in self.clauses)

    def __iter__(self) -> Iterator[ForallClause]:
        return iter(self.clauses)

    def __len__(self) -> int:
        return len(self.clauses)

    def __str__(self) -> str:
        return "\n".join(str(c) for c in self.clauses)


def rank(kb: ProperPlusKB) -> int:
    return kb.rank


def _guard_vars(e: Formula) -> Iterator[Var]:
    if isinstance(e, Eq):
        yield e.var
    elif isinstance(e, Not):
        yield from _guard_vars(e.arg)
    elif isinstance(e, (And, Or, Implies)):
        yield from _guard_vars(e.left)
        yield from _guard_vars(e.right)


# --- traversal -----------------------------------------------------------

def atoms_of(phi: Formula) -> set[Atom]:
    out: set[Atom] = set()
    stack = [phi]
    while stack:
        f = stack.pop()
        if isinstance(f, Atom):
            out.add(f)
        elif isinstance(f, Not):
            stack.append(f.arg)
        elif isinstance(f, (And, Or, Implies)):
            stack.append(f.left)
            stack.append(f.right)
    return out


def clause_atoms(clauses: Iterable[frozenset]) -> set[Atom]:
    return {lit.atom for c in clauses for lit in c}


@singledispatch
def names_of(obj) -> frozenset[Name]:
    """Names occurring syntactically in a KB, clause, formula or literal."""
    if isinstance(obj, frozenset):
        return frozenset(n for lit in obj for n in names_of(lit))
    raise TypeError(f"names_of: unsupported {type(obj).__name__}")


@names_of.register
def _(obj: Name) -> frozenset[Name]:
    return frozenset((obj,))


@names_of.register
def _(obj: Var) -> frozenset[Name]:
    return frozenset()


@names_of.register
def _(obj: Atom) -> frozenset[Name]:
    return frozenset(a for a in obj.args if isinstance(a, Name))


@names_of.register
def _(obj: Literal) -> frozenset[Name]:
    return names_of(obj.atom)


@names_of.register
def _(obj: Const) -> frozenset[Name]:
    return frozenset()


@names_of.register
def _(obj: Eq) -> frozenset[Name]:
    return frozenset((obj.name,))


@names_of.register
def _(obj: Not) -> frozenset[Name]:
    return names_of(obj.arg)


@names_of.register(And)
@names_of.register(Or)
@names_of.register(Implies)
def _(obj) -> frozenset[Name]:
    return names_of(obj.left) | names_of(obj.right)


@names_of.register
def _(obj: ForallClause) -> frozenset[Name]:
    out = set(names_of(obj.guard))
    for lit in obj.body:
        out |= names_of(lit)
    return frozenset(out)


@names_of.register
def _(obj: ProperPlusKB) -> frozenset[Name]:
    out: set[Name] = set()
    for c in obj.clauses:
        out |= names_of(c)
    return frozenset(out)


def predicates_of(*objs) -> dict[str, int]:
    """Map predicate symbol to arity; raises on conflicting arities."""
    sig: dict[str, int] = {}

    def note(atom: Atom):
        prev = sig.setdefault(atom.predicate, atom.arity)
        if prev != atom.arity:
            raise ValidationError(
                f"predicate {atom.predicate} used with arity {prev} and {atom.arity}")

    for obj in objs:
        if isinstance(obj, ProperPlusKB):
            for c in obj.clauses:
                for lit in c.body:
                    note(lit.atom)
        elif isinstance(obj, ForallClause):
            for lit in obj.body:
                note(lit.atom)
        else:
            for a in atoms_of(obj):
                note(a)
    return sig


# --- printing ------------------------------------------------------------

_PREC = {Implies: 1, Or: 2, And: 3, Not: 4}


def _prec(f: Formula) -> int:
    return _PREC.get(type(f), 5)


def format_formula(f: Formula) -> str:
    """Canonical text with minimal parentheses.

    ``&`` and ``|`` associate to the left and ``=>`` to the right, matching the
    parser, so ``parse(format(f)) == f`` holds structurally.
    """
    if isinstance(f, (Atom, Const, Eq)):
        return str(f)
    if isinstance(f, Not):
        if isinstance(f.arg, Eq):
            return f"{f.arg.var} != {f.arg.name}"
        inner = format_formula(f.arg)
        return f"!{inner}" if _prec(f.arg) >= 4 else f"!({inner})"
    p = _prec(f)
    op = {And: "&", Or: "|", Implies: "=>"}[type(f)]
    left, right = format_formula(f.left), format_formula(f.right)
    if isinstance(f, Implies):
        if _prec(f.left) <= p:
            left = f"({left})"
        if _prec(f.right) < p:
            right = f"({right})"
    else:
        if _prec(f.left) < p:
            left = f"({left})"
        if _prec(f.right) <= p:
            right = f"({right})"
    return f"{left} {op} {right}"


def format_clause(clause: Iterable[Literal]) -> str:
    lits = sorted(clause)
    if not lits:
        return "false"
    return " | ".join(str(lit) for lit in lits)


def render(obj) -> str:
    """Canonical printed form of any syntax object."""
    if isinstance(obj, frozenset):
        return format_clause(obj)
    if isinstance(obj, (ProperPlusKB, ForallClause)):
        return str(obj)
    return format_formula(obj)


def canonical_clauses(clauses: Iterable[frozenset]) -> list[frozenset]:
    """Deduplicate and order ground clauses by their printed form."""
    return sorted(set(clauses), key=format_clause)


# --- constructors --------------------------------------------------------

def conj(parts: Iterable[Formula]) -> Formula:
    out: Formula | None = None
    for p in parts:
        out = p if out is None else And(out, p)
    return TRUE if out is None else out


def disj(parts: Iterable[Formula]) -> Formula:
    out: Formula | None = None
    for p in parts:
        out = p if out is None else Or(out, p)
    return FALSE if out is None else out


def literal_formula(lit: Literal) -> Formula:
    return lit.atom if lit.positive else Not(lit.atom)


def clause_formula(clause: Iterable[Literal]) -> Formula:
    return disj(literal_formula(lit) for lit in sorted(clause))


def fold_constants(f: Formula) -> Formula:
    """Semantics-preserving simplification of Boolean constants."""
    if isinstance(f, Not):
        a = fold_constants(f.arg)
        if isinstance(a, Const):
            return Const(not a.value)
        return Not(a)
    if isinstance(f, And):
        a, b = fold_constants(f.left), fold_constants(f.right)
        if a == FALSE or b == FALSE:
            return FALSE
        if a == TRUE:
            return b
        if b == TRUE:
            return a
        return And(a, b)
    if isinstance(f, Or):
        a, b = fold_constants(f.left), fold_constants(f.right)
        if a == TRUE or b == TRUE:
            return TRUE
        if a == FALSE:
            return b
        if b == FALSE:
            return a
        return Or(a, b)
    if isinstance(f, Implies):
        a, b = fold_constants(f.left), fold_constants(f.right)
        if a == FALSE or b == TRUE:
            return TRUE
        if a == TRUE:
            return b
        if b == FALSE:
            return fold_constants(Not(a))
        return Implies(a, b)
    return f
