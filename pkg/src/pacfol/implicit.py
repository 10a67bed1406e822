"""Estimating validity of ``kb => query`` from partial examples.

Each example either certifies the query (its restricted grounding of
``kb & !query`` is refuted for some tuple of example names) or not; the
estimate is the certified fraction, kept as an exact rational.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, islice
from typing import Iterable, Sequence

from .grounding import fresh_names, gnd_with_names
from .limited import entails_z_formula
from .models import PartialModel, restrict, restrict_clauses
from .sat import DEFAULT_STEP_CAP, PropInstance, ResourceLimitExceeded, satisfiable, to_clauses
from .syntax import Formula, Name, Not, ProperPlusKB, ValidationError, names_of


def sample_size(gamma: float, delta: float) -> int:
    """Examples needed so the estimate is within gamma w.p. 1 - delta.

    ``ceil(ln(2/delta) / (2 gamma^2))``; values within 1e-9 of an integer are
    snapped to it so exact cases do not round up on float noise.
    """
    if not (0 < gamma < 1 and 0 < delta < 1):
        raise ValueError("gamma and delta must lie in (0, 1)")
    raw = math.log(2.0 / delta) / (2.0 * gamma * gamma)
    nearest = round(raw)
    if abs(raw - nearest) <= 1e-9 * max(1.0, raw):
        return max(1, int(nearest))
    return max(1, math.ceil(raw))


@dataclass(frozen=True)
class LearnConfig:
    k: int
    z: int | None = None
    tuple_cap: int = 0
    pad_fresh: bool = True
    step_cap: int = DEFAULT_STEP_CAP


@dataclass
class ExampleTrace:
    index: int
    success: bool
    tuple: tuple[str, ...] | None = None
    tried: int = 0
    error: str | None = None

    def to_json(self) -> dict:
        out = {"index": self.index, "success": self.success, "tried": self.tried,
               "tuple": list(self.tuple) if self.tuple is not None else None}
        if self.error:
            out["error"] = self.error
        return out


@dataclass
class Estimate:
    v: int
    m: int
    k: int
    z: int | None = None
    per_example: list[ExampleTrace] = field(default_factory=list)

    @property
    def p_hat(self) -> Fraction:
        return Fraction(self.v, self.m)

    def to_json(self, trace: bool = False) -> dict:
        out = {"v": self.v, "m": self.m, "p_hat": f"{self.v}/{self.m}",
               "p_hat_decimal": float(self.p_hat), "k": self.k, "z": self.z,
               "mode": "sat" if self.z is None else "limited"}
        if trace:
            out["trace"] = [t.to_json() for t in self.per_example]
        return out


def _exact(threshold) -> Fraction:
    if isinstance(threshold, float):
        return Fraction(repr(threshold))
    return Fraction(threshold)


def decide(est: Estimate, threshold) -> bool:
    """``p_hat >= threshold`` in exact rational arithmetic (floats read by repr)."""
    t = _exact(threshold)
    if not 0 <= t <= 1:
        raise ValueError("threshold must lie in [0, 1]")
    return est.p_hat >= t


def candidate_tuples(example: PartialModel, excluded: frozenset[Name], k: int,
                     pad_fresh: bool = True, cap: int = 0) -> list[tuple[Name, ...]]:
    """k-sets of distinct eligible example names, in lexicographic order.

    The grounding depends only on the set of names, so orderings of one set
    are not enumerated separately. With fewer than k eligible names the
    single available set is padded with fresh names (if allowed).
    """
    eligible = sorted(example.names() - excluded)
    if len(eligible) < k:
        if not pad_fresh:
            return []
        pad = fresh_names(set(eligible) | excluded | example.names(), k - len(eligible))
        return [tuple(eligible) + tuple(pad)]
    it = combinations(eligible, k)
    return list(islice(it, cap) if cap > 0 else it)


def _refuted_sat(kb: ProperPlusKB, query: Formula, names: Iterable[Name],
                 example: PartialModel, cfg: LearnConfig) -> bool:
    grounded = restrict_clauses(gnd_with_names(kb, names), example)
    if grounded.falsum:
        return True
    negq = restrict(Not(query), example)
    clauses = grounded.clauses + to_clauses(negq)
    return not satisfiable(PropInstance(tuple(clauses)), cfg.step_cap).sat


def _refuted_limited(kb: ProperPlusKB, query: Formula, names: Iterable[Name],
                     example: PartialModel, cfg: LearnConfig) -> bool:
    grounded = restrict_clauses(gnd_with_names(kb, names), example)
    if grounded.falsum:
        return True
    return entails_z_formula(grounded.clauses, restrict(query, example), cfg.z)


def _run(examples: Sequence[PartialModel], kb: ProperPlusKB, query: Formula,
         cfg: LearnConfig, check) -> Estimate:
    if cfg.k < kb.rank:
        raise ValidationError(f"k={cfg.k} is below the KB rank {kb.rank}")
    if not examples:
        raise ValueError("need at least one example")
    query_names = names_of(query)
    excluded = frozenset(names_of(kb) | query_names)
    v = 0
    traces = []
    for i, example in enumerate(examples):
        trace = ExampleTrace(i, False)
        for tup in candidate_tuples(example, excluded, cfg.k, cfg.pad_fresh, cfg.tuple_cap):
            trace.tried += 1
            try:
                hit = check(kb, query, set(tup) | query_names, example, cfg)
            except ResourceLimitExceeded as exc:
                trace.error = str(exc)
                continue
            if hit:
                trace.success = True
                trace.tuple = tuple(n.token for n in tup)
                v += 1
                break
        traces.append(trace)
    return Estimate(v, len(examples), cfg.k, cfg.z, traces)


def learn_estimate(examples: Sequence[PartialModel], kb: ProperPlusKB, query: Formula,
                   cfg: LearnConfig) -> Estimate:
    """Estimate validity with full propositional reasoning per tuple."""
    return _run(examples, kb, query, cfg, _refuted_sat)


def learn_estimate_limited(examples: Sequence[PartialModel], kb: ProperPlusKB, query: Formula,
                           cfg: LearnConfig) -> Estimate:
    """As :func:`learn_estimate`, deciding each tuple with ``|=_z`` instead."""
    if cfg.z is None or cfg.z < 0:
        raise ValueError("limited mode needs a nonnegative z")
    return _run(examples, kb, query, cfg, _refuted_limited)


def estimate(examples: Sequence[PartialModel], kb: ProperPlusKB, query: Formula,
             cfg: LearnConfig) -> Estimate:
    if cfg.z is None:
        return learn_estimate(examples, kb, query, cfg)
    return learn_estimate_limited(examples, kb, query, cfg)
