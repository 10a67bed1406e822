import numpy as np
import pytest

from pacfol.harness import (
    MaskSpec, PlantingError, WorldDistributionSpec, WorldSampler, apply_mask, implication_holds,
    make_rng, run_calibration, world_satisfies,
)
from pacfol.implicit import LearnConfig
from pacfol.models import consistent
from pacfol.parser import parse_kb, parse_query

VOCAB = [("P", 1), ("R", 2)]
NAMES = ["a", "b", "c"]


def independent(theta):
    return WorldDistributionSpec(vocabulary=VOCAB, names=NAMES, theta=theta, seed=1)


@pytest.mark.parametrize("theta,value", [(0.0, False), (1.0, True)])
def test_degenerate_theta(theta, value):
    sampler = WorldSampler(independent(theta))
    rng = make_rng(0, 1)
    for _ in range(20):
        w = sampler.sample(rng)
        assert len(w.atoms) == 3 + 9
        assert all(w[a] is value for a in w.atoms)


def test_masks_are_consistent():
    sampler = WorldSampler(independent(0.5))
    rng = make_rng(0, 2)
    for rho in (0.0, 0.3, 1.0):
        spec = MaskSpec(rho=rho)
        for _ in range(50):
            w = sampler.sample(rng)
            n = apply_mask(spec, w, rng)
            assert consistent(n, w)
            if rho == 0.0:
                assert len(n) == len(w.atoms)
            if rho == 1.0:
                assert len(n) == 0
    w = sampler.sample(rng)
    by_name = apply_mask(MaskSpec("hide-names", hide=1), w, rng)
    assert len(by_name.names()) == 2 and consistent(by_name, w)
    by_pred = apply_mask(MaskSpec("hide-predicates", predicates=["R"]), w, rng)
    assert all(a.predicate == "P" for a in by_pred.observed)


def test_planted_rate_converges():
    spec = WorldDistributionSpec(vocabulary=[("P", 1), ("Q", 1)], names=NAMES, mode="planted",
                                 implicit="forall x: !P(x) | Q(x)", p=0.7, seed=3)
    sampler = WorldSampler(spec)
    kb = parse_kb(spec.implicit)
    rng = make_rng(7, 3)
    n = 10_000
    hits = sum(world_satisfies(kb, sampler.sample(rng)) for _ in range(n))
    assert abs(hits / n - 0.7) <= 0.02


def test_unsatisfiable_plant_rejected():
    with pytest.raises(PlantingError):
        WorldSampler(WorldDistributionSpec(vocabulary=[("P", 1)], names=["a"], mode="planted",
                                           implicit="forall x: P(x)\nforall x: !P(x)"))


def test_quantified_truth_uses_unnamed_individuals():
    # the fresh individual takes the default value, so "everything is P" fails even if a, b are P
    spec = WorldDistributionSpec(vocabulary=[("P", 1)], names=["a", "b"], theta=1.0)
    w = WorldSampler(spec).sample(make_rng(0))
    assert not world_satisfies(parse_kb("forall x: P(x)"), w)
    assert world_satisfies(parse_kb("forall x: x != a => !Q(x)"), w)
    assert implication_holds(parse_kb("forall x: P(x)"), parse_query("P(zz)"), w)


def test_rng_streams_are_stable():
    a = make_rng(42, 1, 2).random(4)
    b = make_rng(42, 1, 2).random(4)
    c = make_rng(42, 1, 3).random(4)
    assert np.array_equal(a, b) and not np.array_equal(a, c)
    assert make_rng(1, algorithm="philox").random() != make_rng(1).random()


def test_calibration_is_seed_deterministic():
    world = WorldDistributionSpec(vocabulary=[("P", 1), ("Q", 1)], names=NAMES, mode="planted",
                                  implicit="forall x: !P(x) | Q(x)", p=0.8, seed=5)
    kb = parse_kb("forall : P(a)")
    q = parse_query("Q(a)")
    args = (world, MaskSpec(rho=0.2, seed=6), kb, q, LearnConfig(k=1))
    r1 = run_calibration(*args, gamma=0.3, delta=0.3, trials=5, seed=42)
    r2 = run_calibration(*args, gamma=0.3, delta=0.3, trials=5, seed=42)
    r3 = run_calibration(*args, gamma=0.3, delta=0.3, trials=5, seed=43)
    assert r1.to_json() == r2.to_json()
    assert r1.to_json() != r3.to_json()
    assert "runtime_seconds" not in r1.to_json() and "runtime_seconds" in r1.to_json(timing=True)
