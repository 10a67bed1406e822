import random

from hypothesis import given, settings, strategies as st

from oracles import naive_closure, naive_entails_z, naive_subsumed
from pacfol.limited import ClauseStore, entails_z, entails_z_formula, minimal_level, subsumed, up_closure
from pacfol.parser import parse_atom, parse_query
from pacfol.syntax import Literal
from randgen import prop_atoms, random_clause_set, random_ground_clause

A, B, C, D = (parse_atom(t) for t in ("A()", "B()", "C()", "D()"))


def pos(a):
    return Literal(a, True)


def neg(a):
    return Literal(a, False)


def cl(*lits):
    return frozenset(lits)


def test_unit_propagation_closure():
    u = up_closure([cl(pos(A)), cl(neg(A), pos(B)), cl(neg(B), pos(C), pos(D))])
    assert {pos(A), pos(B)} <= u.units
    assert cl(pos(C), pos(D)) in u
    assert subsumed(cl(pos(C), pos(D)), u)
    assert subsumed(cl(pos(B), pos(D)), u)
    assert not subsumed(cl(pos(C)), u)


def test_falsum_closure():
    u = up_closure([cl(pos(A)), cl(neg(A))])
    assert u.falsum
    assert entails_z([cl(pos(A)), cl(neg(A))], cl(pos(D)), 0)


def test_split_needed_at_level_one():
    s = [cl(pos(A), pos(B)), cl(neg(A), pos(C)), cl(neg(B), pos(C))]
    assert not entails_z(s, cl(pos(C)), 0)
    assert entails_z(s, cl(pos(C)), 1)
    assert minimal_level(s, cl(pos(C)), 3) == 1


def test_excluded_middle_is_not_believed_at_level_zero():
    s = [cl(pos(A), pos(B))]
    assert not entails_z(s, cl(pos(C), neg(C)), 2)  # no clause of s mentions C
    assert entails_z_formula(s, parse_query("C() | !C()"), 0)  # tautologies are discharged


def test_formula_lifting():
    s = [cl(pos(A)), cl(neg(A), pos(B))]
    assert entails_z_formula(s, parse_query("A() & B()"), 0)
    assert not entails_z_formula(s, parse_query("A() & C()"), 2)


def test_closure_matches_naive_units_and_subsumption():
    rng = random.Random(51)
    for _ in range(400):
        atoms = prop_atoms(rng.randint(2, 5))
        s = random_clause_set(rng, atoms, 1, 7)
        phi = random_ground_clause(rng, atoms, 1, 3)
        naive = naive_closure(s)
        u = up_closure(s)
        if frozenset() in naive:
            assert u.falsum
            continue
        assert not u.falsum
        assert u.units == {next(iter(c)) for c in naive if len(c) == 1}
        assert subsumed(phi, u) == naive_subsumed(phi, naive)


def test_closure_idempotent():
    rng = random.Random(53)
    for _ in range(200):
        s = random_clause_set(rng, prop_atoms(5), 1, 8)
        u = up_closure(s)
        assert up_closure(u) == u


def test_matches_literal_definition():
    """Subsumption at any level equals the definition's disjunction over levels."""
    rng = random.Random(57)
    for _ in range(300):
        atoms = prop_atoms(rng.randint(2, 4))
        s = random_clause_set(rng, atoms, 1, 5)
        phi = random_ground_clause(rng, atoms, 1, 2)
        for z in range(3):
            expected = any(naive_entails_z(s, phi, w) for w in range(z + 1))
            assert entails_z(s, phi, z) == expected, (s, phi, z)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6))
def test_level_and_store_monotone(seed):
    rng = random.Random(seed)
    atoms = prop_atoms(5)
    s = random_clause_set(rng, atoms, 1, 6)
    phi = random_ground_clause(rng, atoms, 1, 3)
    results = [entails_z(s, phi, z) for z in range(4)]
    assert results == sorted(results)
    bigger = s + [random_ground_clause(rng, atoms, 1, 3)]
    for z in range(3):
        if results[z]:
            assert entails_z(bigger, phi, z)


def test_complete_at_atom_count():
    from oracles import truth_table_sat
    rng = random.Random(59)
    for _ in range(150):
        atoms = prop_atoms(rng.randint(2, 5))
        s = random_clause_set(rng, atoms, 1, 7)
        phi = random_ground_clause(rng, atoms, 1, 2)
        valid = not truth_table_sat(s + [cl(l.negate()) for l in phi])
        assert entails_z(s, phi, len(atoms)) == valid


def test_clause_store_dedupes():
    s = ClauseStore([[pos(A), pos(B)], [pos(B), pos(A)]])
    assert len(s) == 1
    assert s.with_units([pos(C)]).units == {pos(C)}
