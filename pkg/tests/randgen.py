"""Seeded random instance generators shared by the property and acceptance tests."""

from __future__ import annotations

import random

from pacfol.models import PartialModel
from pacfol.syntax import (
    TRUE, And, Atom, Eq, ForallClause, Implies, Literal, Name, Not, Or,
    ProperPlusKB, Var,
)

VARS = (Var("x"), Var("y"), Var("z"))
NAME_POOL = ("a", "b", "c", "d")


def random_guard(rng: random.Random, vs, names, depth: int = 2):
    if depth == 0 or rng.random() < 0.4:
        leaf = Eq(rng.choice(vs), Name(rng.choice(names)))
        return Not(leaf) if rng.random() < 0.5 else leaf
    op = rng.choice((And, Or, Not))
    if op is Not:
        return Not(random_guard(rng, vs, names, depth - 1))
    return op(random_guard(rng, vs, names, depth - 1), random_guard(rng, vs, names, depth - 1))


def random_clause(rng: random.Random, preds, names, max_rank: int = 2, max_body: int = 3,
                  guard_p: float = 0.4, rank: int | None = None) -> ForallClause:
    n_vars = rng.randint(0, max_rank) if rank is None else rank
    if not any(ar for _, ar in preds):
        n_vars = 0
    vs = VARS[:n_vars]
    body = []
    for _ in range(rng.randint(1, max_body)):
        pred, arity = rng.choice(preds)
        args = []
        for _ in range(arity):
            if vs and rng.random() < 0.75:
                args.append(rng.choice(vs))
            else:
                args.append(Name(rng.choice(names)))
        body.append(Literal(Atom(pred, tuple(args)), rng.random() < 0.6))
    # every declared variable must occur for the rank to be what we asked for
    used = {a for lit in body for a in lit.atom.args if isinstance(a, Var)}
    guard = TRUE
    if vs and rng.random() < guard_p:
        guard = random_guard(rng, vs, names)
    missing = [v for v in vs if v not in used and v not in _guard_vars(guard)]
    for v in missing:
        pred, arity = rng.choice([p for p in preds if p[1] > 0])
        body.append(Literal(Atom(pred, (v,) * arity), rng.random() < 0.6))
    return ForallClause(guard, tuple(body))


def _guard_vars(e):
    if isinstance(e, Eq):
        return {e.var}
    if isinstance(e, Not):
        return _guard_vars(e.arg)
    if isinstance(e, (And, Or)):
        return _guard_vars(e.left) | _guard_vars(e.right)
    return set()


def random_signature(rng: random.Random, max_preds: int = 2, max_arity: int = 2):
    names = ["P", "Q", "R", "S"][: rng.randint(1, max_preds)]
    return [(p, rng.randint(0, max_arity)) for p in names]


def random_kb(rng: random.Random, max_clauses: int = 3, max_rank: int = 2, preds=None,
              names=NAME_POOL, guard_p: float = 0.4) -> ProperPlusKB:
    preds = preds or random_signature(rng)
    return ProperPlusKB(tuple(random_clause(rng, preds, names, max_rank, guard_p=guard_p)
                              for _ in range(rng.randint(1, max_clauses))))


def random_ground_atom(rng: random.Random, preds, names) -> Atom:
    pred, arity = rng.choice(preds)
    return Atom(pred, tuple(Name(rng.choice(names)) for _ in range(arity)))


def random_formula(rng: random.Random, atoms, depth: int = 4):
    if depth == 0 or rng.random() < 0.3:
        return rng.choice(atoms)
    op = rng.choice((And, Or, Implies, Not, Not))
    if op is Not:
        return Not(random_formula(rng, atoms, depth - 1))
    return op(random_formula(rng, atoms, depth - 1), random_formula(rng, atoms, depth - 1))


def prop_atoms(n: int, pred: str = "P"):
    return [Atom(pred, (Name(str(i)),)) for i in range(1, n + 1)]


def random_ground_clause(rng: random.Random, atoms, min_len: int = 1, max_len: int = 3) -> frozenset:
    k = rng.randint(min_len, min(max_len, len(atoms)))
    return frozenset(Literal(a, rng.random() < 0.5) for a in rng.sample(atoms, k))


def random_clause_set(rng: random.Random, atoms, n_min: int = 2, n_max: int = 7,
                      max_len: int = 3, unit_p: float = 0.3) -> list[frozenset]:
    out = []
    for _ in range(rng.randint(n_min, n_max)):
        if rng.random() < unit_p:
            out.append(random_ground_clause(rng, atoms, 1, 1))
        else:
            out.append(random_ground_clause(rng, atoms, 2, max_len))
    return out


def random_partial(rng: random.Random, atoms, observe_p: float = 0.5) -> PartialModel:
    return PartialModel({a: rng.random() < 0.5 for a in atoms if rng.random() < observe_p})
