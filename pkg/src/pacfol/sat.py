"""CNF conversion, a DPLL decision procedure, and entailment via grounding."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .grounding import FRESH_PREFIX, GroundTask, gnd_minus
from .models import WorldModel, evaluate, evaluate_clause
from .syntax import (
    And, Atom, Const, Formula, Implies, Literal, LogicError, Not, Or,
    ProperPlusKB, atoms_of, fold_constants,
)

AUX_PREFIX = "_t"
DEFAULT_DIRECT_LIMIT = 16
DEFAULT_STEP_CAP = 10_000_000
MAX_DIRECT_CLAUSES = 4096


class ResourceLimitExceeded(RuntimeError):
    """The solver hit its step cap before deciding the instance."""


class CNFBudgetError(LogicError):
    """A formula is too large for equivalence-preserving CNF conversion."""


def is_aux(atom: Atom) -> bool:
    return atom.predicate.startswith(AUX_PREFIX)


# --- CNF -----------------------------------------------------------------

def _nnf(f: Formula, positive: bool = True):
    """Negation normal form as nested ('and'|'or', [...]) tuples over Literals."""
    if isinstance(f, Atom):
        return Literal(f, positive)
    if isinstance(f, Const):
        return f.value == positive
    if isinstance(f, Not):
        return _nnf(f.arg, not positive)
    if isinstance(f, Implies):
        f = Or(Not(f.left), f.right)
    if isinstance(f, And):
        op = "and" if positive else "or"
    elif isinstance(f, Or):
        op = "or" if positive else "and"
    else:
        raise TypeError(f"not a ground formula: {f!r}")
    return (op, [_nnf(f.left, positive), _nnf(f.right, positive)])


def _is_tautology(clause: frozenset) -> bool:
    return any(lit.negate() in clause for lit in clause)


def _reduce(clauses: Iterable[frozenset]) -> list[frozenset]:
    """Drop tautologies and subsumed clauses."""
    uniq = sorted({c for c in clauses if not _is_tautology(c)}, key=len)
    kept: list[frozenset] = []
    for c in uniq:
        if not any(k <= c for k in kept):
            kept.append(c)
    return kept


def _distribute(node, limit: int) -> list[frozenset]:
    if isinstance(node, bool):
        return [] if node else [frozenset()]
    if isinstance(node, Literal):
        return [frozenset((node,))]
    op, parts = node
    subs = [_distribute(p, limit) for p in parts]
    if op == "and":
        out = _reduce(c for s in subs for c in s)
    else:
        out = [frozenset()]
        for s in subs:
            if len(out) * len(s) > limit:
                raise CNFBudgetError("direct CNF conversion exceeds the clause budget")
            out = _reduce(a | b for a in out for b in s)
    if len(out) > limit:
        raise CNFBudgetError("direct CNF conversion exceeds the clause budget")
    return out


def cnf_direct(phi: Formula, atom_limit: int = DEFAULT_DIRECT_LIMIT,
               clause_limit: int = MAX_DIRECT_CLAUSES) -> list[frozenset]:
    """Equivalent clause set without auxiliary atoms.

    Tautological and subsumed clauses are removed, so ``true`` yields ``[]``
    and ``false`` yields ``[frozenset()]``.
    """
    phi = fold_constants(phi)
    if len(atoms_of(phi)) > atom_limit:
        raise CNFBudgetError(
            f"formula has {len(atoms_of(phi))} atoms; direct CNF budget is {atom_limit}")
    return _distribute(_nnf(phi), clause_limit)


def tseitin(phi: Formula, prefix: str = AUX_PREFIX) -> list[frozenset]:
    """Equisatisfiable clause set; auxiliary atoms are 0-ary ``_t<i>`` predicates."""
    phi = fold_constants(phi)
    if isinstance(phi, Const):
        return [] if phi.value else [frozenset()]
    clauses: list[frozenset] = []
    counter = [0]
    memo: dict[Formula, Literal] = {}

    def lit_of(f: Formula) -> Literal:
        if isinstance(f, Atom):
            return Literal(f)
        if isinstance(f, Not):
            return lit_of(f.arg).negate()
        if f in memo:
            return memo[f]
        a, b = lit_of(f.left), lit_of(f.right)
        counter[0] += 1
        x = Literal(Atom(f"{prefix}{counter[0]}"))
        nx, na, nb = x.negate(), a.negate(), b.negate()
        if isinstance(f, And):
            clauses.extend([frozenset((nx, a)), frozenset((nx, b)), frozenset((na, nb, x))])
        elif isinstance(f, Or):
            clauses.extend([frozenset((nx, a, b)), frozenset((na, x)), frozenset((nb, x))])
        else:
            clauses.extend([frozenset((nx, na, b)), frozenset((a, x)), frozenset((nb, x))])
        memo[f] = x
        return x

    clauses.append(frozenset((lit_of(phi),)))
    return clauses


def to_clauses(phi: Formula, direct_limit: int = DEFAULT_DIRECT_LIMIT) -> list[frozenset]:
    """Clauses for a ground formula: direct CNF when small, Tseitin otherwise."""
    try:
        return cnf_direct(phi, direct_limit)
    except CNFBudgetError:
        return tseitin(phi)


# --- DPLL ----------------------------------------------------------------

@dataclass(frozen=True)
class PropInstance:
    clauses: tuple[frozenset, ...] = ()
    extra: Formula | None = None


@dataclass
class SatResult:
    status: str
    model: dict[Atom, bool] | None = None
    steps: int = 0

    @property
    def sat(self) -> bool:
        return self.status == "sat"


def _solve(clauses: list[list[int]], nvars: int, step_cap: int):
    """Chronological backtracking with unit propagation and pure literals.

    Returns (values or None, steps). ``values[v]`` is 1, -1 or 0 (free).
    """
    vals = [0] * (nvars + 1)
    trail: list[int] = []
    steps = 0

    def assign(lit: int):
        nonlocal steps
        steps += 1
        if steps > step_cap:
            raise ResourceLimitExceeded(f"step cap {step_cap} exceeded")
        vals[abs(lit)] = 1 if lit > 0 else -1
        trail.append(abs(lit))

    def propagate() -> bool:
        while True:
            changed = False
            open_lits: dict[int, int] = {}
            for clause in clauses:
                free = 0
                last = 0
                satisfied = False
                for lit in clause:
                    v = vals[lit if lit > 0 else -lit]
                    if v == 0:
                        free += 1
                        last = lit
                    elif (v > 0) == (lit > 0):
                        satisfied = True
                        break
                if satisfied:
                    continue
                if free == 0:
                    return False
                if free == 1:
                    if vals[abs(last)] == 0:
                        assign(last)
                        changed = True
                    continue
                for lit in clause:
                    if vals[abs(lit)] == 0:
                        open_lits[lit] = 1
            if changed:
                continue
            for lit in sorted(open_lits, key=abs):
                if -lit not in open_lits and vals[abs(lit)] == 0:
                    assign(lit)
                    changed = True
            if not changed:
                return True

    def branch_var() -> int:
        best = 0
        for clause in clauses:
            if any((vals[abs(l)] > 0) == (l > 0) and vals[abs(l)] != 0 for l in clause):
                continue
            for l in clause:
                v = abs(l)
                if vals[v] == 0 and (best == 0 or v < best):
                    best = v
        return best

    stack: list[tuple[int, int, bool]] = []
    while True:
        if propagate():
            var = branch_var()
            if var == 0:
                return vals, steps
            stack.append((len(trail), var, False))
            assign(-var)
            continue
        while stack:
            mark, var, flipped = stack.pop()
            while len(trail) > mark:
                vals[trail.pop()] = 0
            if not flipped:
                stack.append((mark, var, True))
                assign(var)
                break
        else:
            return None, steps


def satisfiable(inst: PropInstance | Iterable[frozenset], step_cap: int = DEFAULT_STEP_CAP,
                direct_limit: int = DEFAULT_DIRECT_LIMIT) -> SatResult:
    """Decide a clause set (plus optional extra ground formula).

    The returned model covers every non-auxiliary atom of the instance and is
    checked against all clauses and the extra formula before being reported.
    """
    if not isinstance(inst, PropInstance):
        inst = PropInstance(tuple(inst))
    clauses = list(inst.clauses)
    if inst.extra is not None:
        clauses.extend(to_clauses(inst.extra, direct_limit))
    if any(len(c) == 0 for c in clauses):
        return SatResult("unsat")

    atoms = sorted({lit.atom for c in clauses for lit in c})
    index = {a: i + 1 for i, a in enumerate(atoms)}
    encoded = [sorted({index[l.atom] if l.positive else -index[l.atom] for l in c}, key=abs)
               for c in clauses]
    vals, steps = _solve(encoded, len(atoms), step_cap)
    if vals is None:
        return SatResult("unsat", steps=steps)

    full = {a: vals[index[a]] > 0 for a in atoms}
    world = WorldModel(full)
    bad = [c for c in clauses if not evaluate_clause(c, world)]
    if bad:
        raise AssertionError(f"solver returned a model violating {len(bad)} clauses")
    model = {a: v for a, v in full.items() if not is_aux(a)}
    if inst.extra is not None:
        for a in atoms_of(inst.extra):
            model.setdefault(a, False)
    if inst.extra is not None and not evaluate(inst.extra, WorldModel(model)):
        raise AssertionError("solver model violates the extra formula")
    return SatResult("sat", model, steps)


# --- entailment ----------------------------------------------------------

@dataclass
class EntailmentResult:
    entailed: bool
    task: GroundTask
    countermodel: dict[Atom, bool] | None = None
    steps: int = 0


def check_entailment(kb: ProperPlusKB, query: Formula, step_cap: int = DEFAULT_STEP_CAP,
                     fresh_prefix: str = FRESH_PREFIX, extra: int | None = None) -> EntailmentResult:
    """kb |= query iff GND^-(kb & !query) is unsatisfiable.

    A countermodel, when one exists, is verified against every grounded
    clause and the negated query.
    """
    task = gnd_minus(kb, query, fresh_prefix, extra)
    result = satisfiable(PropInstance(task.kb_clauses, task.negated_query), step_cap)
    if not result.sat:
        return EntailmentResult(True, task, steps=result.steps)
    return EntailmentResult(False, task, result.model, result.steps)


def entails(kb: ProperPlusKB, query: Formula, step_cap: int = DEFAULT_STEP_CAP) -> bool:
    return check_entailment(kb, query, step_cap).entailed


def clauses_entail(clauses: Sequence[frozenset], query: Formula,
                   step_cap: int = DEFAULT_STEP_CAP) -> bool:
    """Propositional entailment between a ground clause set and a ground formula."""
    return not satisfiable(PropInstance(tuple(clauses), Not(query)), step_cap).sat
