"""Synthetic worlds, masking processes and calibration runs.

Worlds are finite overrides over a declared vocabulary (predicates x names);
every other atom takes the world's default. Quantified formulas are judged
exactly over the infinite name domain: names outside the world's support all
look alike, so grounding over the support plus rank-many fresh names decides
them.

Randomness comes from numpy ``Generator`` objects seeded through
``SeedSequence([seed, stream, index])`` so each trial owns an independent,
reproducible stream and serial and parallel runs agree.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .grounding import fresh_names, gnd_with_names
from .implicit import LearnConfig, candidate_tuples, estimate, sample_size
from .models import (
    PartialModel, WorldModel, evaluate, evaluate_clause, witness_forall,
)
from .parser import parse_kb
from .sat import PropInstance, check_entailment, satisfiable
from .syntax import Atom, Formula, Literal, LogicError, Name, ProperPlusKB, names_of

RNG_ALGORITHMS = {"pcg64": np.random.PCG64, "philox": np.random.Philox}

_STREAM_TRIAL, _STREAM_REFERENCE, _STREAM_MASK = 1, 2, 3


class PlantingError(LogicError):
    """The planted theory cannot be realised over the declared vocabulary."""


def make_rng(seed: int, *stream: int, algorithm: str = "pcg64") -> np.random.Generator:
    try:
        bitgen = RNG_ALGORITHMS[algorithm]
    except KeyError:
        raise ValueError(f"unknown rng {algorithm!r}; choose from {sorted(RNG_ALGORITHMS)}") from None
    return np.random.Generator(bitgen(np.random.SeedSequence([int(seed), *map(int, stream)])))


# --- specs ---------------------------------------------------------------

@dataclass
class WorldDistributionSpec:
    vocabulary: list[tuple[str, int]]
    names: list[str]
    mode: str = "independent"
    theta: float = 0.5
    default: int = 0
    seed: int = 0
    rng: str = "pcg64"
    # planted mode
    implicit: str | None = None
    p: float = 1.0
    violate: int = 0
    clause_p: list[float] | None = None
    background: str | None = None

    def __post_init__(self):
        self.vocabulary = [(str(pred), int(ar)) for pred, ar in self.vocabulary]
        if self.mode not in ("independent", "planted"):
            raise ValueError(f"unknown world mode {self.mode!r}")
        if not 0.0 <= self.theta <= 1.0 or not 0.0 <= self.p <= 1.0:
            raise ValueError("probabilities must lie in [0, 1]")
        if self.mode == "planted" and not self.implicit:
            raise ValueError("planted mode needs an implicit KB")
        if self.clause_p is not None and any(not 0.0 <= q <= 1.0 for q in self.clause_p):
            raise ValueError("clause probabilities must lie in [0, 1]")


@dataclass
class MaskSpec:
    kind: str = "independent-hide"
    rho: float = 0.0
    hide: int = 0
    predicates: list[str] = field(default_factory=list)
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("independent-hide", "hide-names", "hide-predicates"):
            raise ValueError(f"unknown mask kind {self.kind!r}")
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError("rho must lie in [0, 1]")


# --- exact evaluation of quantified knowledge in a world ------------------

def world_satisfies(kb: ProperPlusKB, world: WorldModel) -> bool:
    """Whether ``world`` satisfies every clause of ``kb`` over all names."""
    names = set(world.names()) | set(names_of(kb))
    extra = fresh_names(names, kb.rank)
    return all(evaluate_clause(c, world) for c in gnd_with_names(kb, world.names() | set(extra)))


def implication_holds(kb: ProperPlusKB, query: Formula, world: WorldModel) -> bool:
    """Truth of ``kb => query`` in ``world``."""
    return evaluate(query, world) or not world_satisfies(kb, world)


# --- world sampling ------------------------------------------------------

class WorldSampler:
    """Draws worlds from a :class:`WorldDistributionSpec`."""

    def __init__(self, spec: WorldDistributionSpec):
        self.spec = spec
        names = [Name(n) for n in spec.names]
        self.atoms = sorted(Atom(pred, args) for pred, ar in spec.vocabulary
                            for args in product(names, repeat=ar))
        self.index = {a: i for i, a in enumerate(self.atoms)}
        self.default = bool(spec.default)
        self.groups: list[list[list[int]]] = []
        self.background: list[list[int]] = []
        self.implicit: ProperPlusKB | None = None
        if spec.mode == "planted":
            self.implicit = parse_kb(spec.implicit)
            bg = parse_kb(spec.background) if spec.background else None
            universe = set(names) | set(names_of(self.implicit))
            if bg is not None:
                universe |= set(names_of(bg))
            rank = max(self.implicit.rank, bg.rank if bg else 0)
            universe |= set(fresh_names(universe, rank))
            for clause in self.implicit.clauses:
                self.groups.append(self._encode(gnd_with_names(ProperPlusKB((clause,)), universe)))
            if bg is not None:
                self.background = self._encode(gnd_with_names(bg, universe))
            if spec.clause_p is not None and len(spec.clause_p) != len(self.groups):
                raise ValueError("clause_p needs one probability per implicit clause")
            if not 0 <= spec.violate < len(self.groups):
                raise ValueError("violate must index an implicit clause")
            every = [c for g in self.groups for c in g] + self.background
            if self._solve(every, {}) is None:
                raise PlantingError("planted implicit KB is unsatisfiable over the declared names")

    def _encode(self, clauses: Iterable[frozenset]) -> list[list[int]]:
        """Clauses over vocabulary atoms as signed 1-based indices.

        Atoms outside the vocabulary are fixed to the default value.
        """
        out = []
        for c in clauses:
            lits = []
            satisfied = False
            for lit in c:
                i = self.index.get(lit.atom)
                if i is None:
                    if self.default == lit.positive:
                        satisfied = True
                        break
                    continue
                lits.append(i + 1 if lit.positive else -(i + 1))
            if satisfied:
                continue
            if not lits:
                raise PlantingError(f"clause {sorted(map(str, c))} is false outside the vocabulary")
            out.append(sorted(set(lits)))
        return out

    def _solve(self, clauses: list[list[int]], fixed: dict[int, bool]) -> dict[int, bool] | None:
        """Deterministic completion of ``fixed`` satisfying ``clauses`` (or None)."""
        atoms = self.atoms
        cnf = [frozenset(_to_literal(atoms, l) for l in c) for c in clauses]
        cnf += [frozenset((_to_literal(atoms, i + 1 if v else -(i + 1)),)) for i, v in fixed.items()]
        result = satisfiable(PropInstance(tuple(cnf)))
        if not result.sat:
            return None
        return {self.index[a]: v for a, v in result.model.items()}

    def _repair(self, rng: np.random.Generator, values: np.ndarray, clauses: list[list[int]],
                fixed: dict[int, bool], max_flips: int) -> np.ndarray | None:
        """WalkSAT-style local search from ``values`` with ``fixed`` atoms frozen."""
        for i, v in fixed.items():
            values[i] = v
        def unsat():
            return [c for c in clauses
                    if not any(values[abs(l) - 1] == (l > 0) for l in c)]

        broken = unsat()
        flips = 0
        while broken:
            if flips >= max_flips:
                return None
            clause = broken[int(rng.integers(len(broken)))]
            movable = [l for l in clause if (abs(l) - 1) not in fixed]
            if not movable:
                return None
            lit = movable[int(rng.integers(len(movable)))]
            values[abs(lit) - 1] = lit > 0
            flips += 1
            broken = unsat()
        return values

    def _realise(self, rng: np.random.Generator, clauses: list[list[int]],
                 fixed: dict[int, bool]) -> np.ndarray | None:
        values = rng.random(len(self.atoms)) < self.spec.theta
        out = self._repair(rng, values, clauses, fixed, max_flips=50 * (len(self.atoms) + 1))
        if out is not None:
            return out
        model = self._solve(clauses, fixed)
        if model is None:
            return None
        values = np.full(len(self.atoms), self.default)
        for i, v in model.items():
            values[i] = v
        return values

    def _violation(self, rng: np.random.Generator, group: int, fixed: dict[int, bool]) -> bool:
        """Fix every literal of a random instance of clause ``group`` to false."""
        options = [c for c in self.groups[group]
                   if not any(-l in c for l in c)
                   and all(fixed.get(abs(l) - 1, not (l > 0)) == (not (l > 0)) for l in c)]
        if not options:
            return False
        clause = options[int(rng.integers(len(options)))]
        for l in clause:
            fixed[abs(l) - 1] = not (l > 0)
        return True

    def sample(self, rng: np.random.Generator) -> WorldModel:
        spec = self.spec
        if spec.mode == "independent":
            values = rng.random(len(self.atoms)) < spec.theta
            return self._world(values)
        for _ in range(32):
            fixed: dict[int, bool] = {}
            keep = list(self.background)
            if spec.clause_p is None:
                if rng.random() < spec.p:
                    keep += [c for g in self.groups for c in g]
                elif not self._violation(rng, spec.violate, fixed):
                    raise PlantingError("designated clause has no falsifiable instance")
            else:
                ok = True
                for g, q in enumerate(spec.clause_p):
                    if rng.random() < q:
                        keep += self.groups[g]
                    elif not self._violation(rng, g, fixed):
                        ok = False
                if not ok:
                    continue
            values = self._realise(rng, keep, fixed)
            if values is not None:
                return self._world(values)
        raise PlantingError("could not realise a world for the planted recipe")

    def _world(self, values: np.ndarray) -> WorldModel:
        return WorldModel({a: bool(values[i]) for i, a in enumerate(self.atoms)}, self.default)


def _to_literal(atoms: Sequence[Atom], l: int) -> Literal:
    return Literal(atoms[abs(l) - 1], l > 0)


def sample_world(spec: WorldDistributionSpec, rng: np.random.Generator,
                 sampler: WorldSampler | None = None) -> WorldModel:
    return (sampler or WorldSampler(spec)).sample(rng)


def apply_mask(spec: MaskSpec, world: WorldModel, rng: np.random.Generator) -> PartialModel:
    """Hide part of ``world``; the result is always consistent with it."""
    items = sorted(world.assignment.items())
    if spec.kind == "independent-hide":
        keep = rng.random(len(items)) >= spec.rho
        return PartialModel({a: v for (a, v), k in zip(items, keep) if k})
    if spec.kind == "hide-names":
        names = sorted(world.names())
        h = min(spec.hide, len(names))
        chosen = {names[i] for i in rng.choice(len(names), size=h, replace=False)} if h else set()
        return PartialModel({a: v for a, v in items if not (names_of(a) & chosen)})
    hidden = set(spec.predicates)
    return PartialModel({a: v for a, v in items if a.predicate not in hidden})


# --- calibration ---------------------------------------------------------

def implicit_witnessed(implicit: ProperPlusKB, example: PartialModel, kb: ProperPlusKB,
                       query: Formula, k: int) -> bool:
    """Whether some k names of the example witness every implicit clause.

    The binding pool is the tuple together with the names of kb and query.
    """
    mentioned = frozenset(names_of(kb) | names_of(query))
    for tup in candidate_tuples(example, mentioned, k, pad_fresh=True):
        pool = set(tup) | mentioned
        if all(witness_forall(c, example, pool) for c in implicit.clauses):
            return True
    return False


@dataclass
class CalibrationReport:
    trials: int
    gamma: str
    delta: str
    m: int
    k: int
    z: int | None
    seed: int
    p_true: str
    p_witness: str | None
    p_planted: float | None
    fraction_sound: float
    fraction_complete: float | None
    p_hats: list[str]
    implicit_entails_query: bool | None = None
    runtime_seconds: float = 0.0

    def to_json(self, timing: bool = False) -> dict:
        out = asdict(self)
        if not timing:
            del out["runtime_seconds"]
        return out

    def summary(self) -> str:
        lines = [
            f"trials={self.trials} m={self.m} gamma={self.gamma} delta={self.delta} k={self.k} z={self.z}",
            f"p_true~{float(Fraction(self.p_true)):.4f} fraction_sound={self.fraction_sound:.3f}",
        ]
        if self.fraction_complete is not None:
            lines.append(f"p_witness~{float(Fraction(self.p_witness)):.4f} "
                         f"fraction_complete={self.fraction_complete:.3f}")
        lines.append(f"runtime {self.runtime_seconds:.2f}s")
        return "\n".join(lines)


def _exact(x) -> Fraction:
    return Fraction(repr(x)) if isinstance(x, float) else Fraction(x)


def run_calibration(world: WorldDistributionSpec, mask: MaskSpec, kb: ProperPlusKB,
                    query: Formula, cfg: LearnConfig, gamma: float, delta: float,
                    trials: int, seed: int) -> CalibrationReport:
    """Repeat the estimator ``trials`` times and compare with reference rates.

    ``p_true`` (validity of kb => query) and, for planted worlds, the rate
    at which the implicit KB is witnessed are Monte-Carlo estimates over
    ``10 * m`` extra masked worlds drawn from a separate stream.
    """
    start = time.perf_counter()
    m = sample_size(gamma, delta)
    g = _exact(gamma)
    sampler = WorldSampler(world)
    algo = world.rng
    wseed, mseed = int(world.seed), int(mask.seed)

    ref_world = make_rng(seed, wseed, _STREAM_REFERENCE, algorithm=algo)
    ref_mask = make_rng(seed, mseed, _STREAM_REFERENCE, _STREAM_MASK, algorithm=algo)
    n_ref = 10 * m
    holds = 0
    witnessed = 0
    for _ in range(n_ref):
        w = sampler.sample(ref_world)
        holds += implication_holds(kb, query, w)
        if sampler.implicit is not None:
            witnessed += implicit_witnessed(sampler.implicit, apply_mask(mask, w, ref_mask),
                                            kb, query, cfg.k)
    p_true = Fraction(holds, n_ref)
    p_witness = Fraction(witnessed, n_ref) if sampler.implicit is not None else None

    p_hats: list[Fraction] = []
    for t in range(trials):
        wr = make_rng(seed, wseed, _STREAM_TRIAL, t, algorithm=algo)
        mr = make_rng(seed, mseed, _STREAM_TRIAL, t, _STREAM_MASK, algorithm=algo)
        examples = [apply_mask(mask, sampler.sample(wr), mr) for _ in range(m)]
        p_hats.append(estimate(examples, kb, query, cfg).p_hat)

    sound = sum(p <= p_true + g for p in p_hats)
    complete = None if p_witness is None else sum(p >= p_witness - g for p in p_hats)
    entailed = None
    if sampler.implicit is not None:
        joint = ProperPlusKB(tuple(kb.clauses) + tuple(sampler.implicit.clauses))
        entailed = check_entailment(joint, query).entailed
    return CalibrationReport(
        trials=trials, gamma=str(g), delta=str(_exact(delta)), m=m, k=cfg.k, z=cfg.z, seed=seed,
        p_true=str(p_true), p_witness=None if p_witness is None else str(p_witness),
        p_planted=world.p if world.mode == "planted" else None,
        fraction_sound=sound / trials,
        fraction_complete=None if complete is None else complete / trials,
        p_hats=[f"{p.numerator}/{p.denominator}" if p.denominator != 1 else str(p.numerator)
                for p in p_hats],
        implicit_entails_query=entailed,
        runtime_seconds=time.perf_counter() - start,
    )


def empirical_validity(kbs: Sequence[ProperPlusKB], queries: Sequence[Formula],
                       world: WorldDistributionSpec, n: int, seed: int) -> tuple[list[Fraction], list[Fraction]]:
    """Fraction of ``n`` sampled worlds satisfying each KB and each ground query."""
    sampler = WorldSampler(world)
    rng = make_rng(seed, int(world.seed), _STREAM_REFERENCE, algorithm=world.rng)
    kb_hits = [0] * len(kbs)
    q_hits = [0] * len(queries)
    for _ in range(n):
        w = sampler.sample(rng)
        for i, kb in enumerate(kbs):
            kb_hits[i] += world_satisfies(kb, w)
        for i, q in enumerate(queries):
            q_hits[i] += evaluate(q, w)
    return [Fraction(h, n) for h in kb_hits], [Fraction(h, n) for h in q_hits]
