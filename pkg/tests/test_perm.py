from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grouprecovery.corpus import WE6_GENERATORS
from grouprecovery.group import PermutationGroup
from grouprecovery.perm import (
    Permutation,
    PermutationError,
    compose,
    cycle_type,
    fix_count,
    fix_k_count,
    format_cycles,
    format_images,
    identity,
    inverse,
    is_even,
    ordered_pairs,
    pair_index,
    pair_lift,
    parity,
    parse_cycles,
    same_cycle,
)

from .oracles import burnside_orbit_count, orbit_blocks, closure


@st.composite
def perms(draw, n=None, max_n=8):
    if n is None:
        n = draw(st.integers(1, max_n))
    return Permutation(draw(st.permutations(list(range(n)))))


@st.composite
def perm_pairs(draw, max_n=8):
    n = draw(st.integers(1, max_n))
    return draw(perms(n)), draw(perms(n))


def P(text, n):
    return parse_cycles(text, n)


def test_identity_images():
    assert identity(4).images == [1, 2, 3, 4]
    assert fix_count(identity(5)) == 5
    assert parity(identity(5)) == "even"


def test_compose_convention_right_factor_first():
    a, b = P("(1,2)", 3), P("(2,3)", 3)
    c = compose(a, b)
    # 1 -> b -> 1 -> a -> 2; 2 -> 3 -> 3; 3 -> 2 -> 1
    assert c.images == [2, 3, 1]
    assert c(1) == a(b(1))
    assert format_cycles(c) == "(1,2,3)"
    assert cycle_type(c) == [3]
    assert compose(b, a).images == [3, 1, 2]


def test_compose_examples():
    p = P("(1,3,2)(4,5)", 5)
    assert compose(p, identity(5)) == p
    assert compose(P("(1,2)", 4), P("(1,2)", 4)) == identity(4)
    with pytest.raises(PermutationError):
        compose(identity(3), identity(4))


def test_parity_examples():
    assert is_even(identity(6))
    assert parity(P("(1,2)", 4)) == "odd"
    for s in WE6_GENERATORS:
        assert parity(P(s, 27)) == "even"


def test_fix_k_examples():
    assert fix_k_count(identity(5), 2) == 20
    assert fix_k_count(P("(1,2,3,4)", 5), 2) == 0
    assert fix_k_count(P("(1,2)", 5), 2) == 6
    with pytest.raises(PermutationError):
        fix_k_count(identity(3), 4)


def test_same_cycle_examples():
    assert same_cycle(P("(1,2,3)", 3), 1, 3)
    assert not same_cycle(P("(1,2)(3,4)", 4), 1, 3)
    assert not same_cycle(identity(3), 1, 2)
    assert same_cycle(identity(3), 2, 2)


def test_pair_enumeration_is_lexicographic():
    assert ordered_pairs(3) == [(1, 2), (1, 3), (2, 1), (2, 3), (3, 1), (3, 2)]
    for idx, (i, j) in enumerate(ordered_pairs(5), 1):
        assert pair_index(i, j, 5) == idx


def test_pair_lift_examples():
    assert pair_lift(identity(3)) == identity(6)
    c = P("(1,2,3,4,5)", 5)
    lifted = pair_lift(c)
    orbits = orbit_blocks(closure([lifted], 20), 20)
    assert sorted(len(o) for o in orbits) == [5, 5, 5, 5]
    # index of (i,j) goes to index of (c(i), c(j))
    for i, j in ordered_pairs(5):
        assert lifted(pair_index(i, j, 5)) == pair_index(c(i), c(j), 5)


def test_parse_examples():
    assert P("(1,2)(3,4)", 4).images == [2, 1, 4, 3]
    assert P("", 3) == identity(3)
    assert P("()", 3) == identity(3)
    assert P("[2,1,4,3]", 4) == P("(1,2)(3,4)", 4)
    assert P(" ( 1, 2 ) ", 2) == P("(1,2)", 2)
    s1 = P(WE6_GENERATORS[0], 27)
    assert fix_count(s1) == 0 and s1.order() == 3
    assert compose(s1, compose(s1, s1)) == identity(27)


@pytest.mark.parametrize("text,n", [("(1,2", 3), ("(1,4)", 3), ("(1,1)", 3), ("(1,2)(2,3)", 3),
                                     ("(a,b)", 3), ("[1,2]", 3), ("[1,1,2]", 3), ("x(1,2)", 3)])
def test_parse_errors(text, n):
    with pytest.raises(PermutationError):
        parse_cycles(text, n)


def test_point_range_errors():
    with pytest.raises(PermutationError):
        identity(3)(4)
    with pytest.raises(PermutationError):
        Permutation([0, 0, 1])
    with pytest.raises(PermutationError):
        identity(0)


@given(perms())
def test_bijection_and_inverse(p):
    n = len(p)
    assert sorted(p.images) == list(range(1, n + 1))
    assert compose(p, inverse(p)) == identity(n)
    assert compose(inverse(p), p) == identity(n)


@given(perms())
def test_format_parse_roundtrip(p):
    n = len(p)
    assert parse_cycles(format_cycles(p), n) == p
    assert parse_cycles(format_images(p), n) == p


@given(perm_pairs())
def test_parity_is_a_homomorphism(ab):
    a, b = ab
    assert is_even(compose(a, b)) == (is_even(a) == is_even(b))


@given(perms())
def test_fix_one_is_fix(p):
    assert fix_k_count(p, 1) == fix_count(p)


@settings(max_examples=50)
@given(perm_pairs(max_n=7).filter(lambda ab: len(ab[0]) >= 2))
def test_pair_lift_homomorphism(ab):
    a, b = ab
    assert pair_lift(compose(a, b)) == compose(pair_lift(a), pair_lift(b))
    assert pair_lift(identity(len(a))) == identity(len(a) * (len(a) - 1))


@given(perms(), st.data())
def test_same_cycle_is_equivalence(p, data):
    n = len(p)
    i, j, k = (data.draw(st.integers(1, n)) for _ in range(3))
    assert same_cycle(p, i, i)
    assert same_cycle(p, i, j) == same_cycle(p, j, i)
    if same_cycle(p, i, j) and same_cycle(p, j, k):
        assert same_cycle(p, i, k)


@pytest.mark.parametrize("k", [1, 2])
def test_burnside_on_s4(k):
    elements = [Permutation(p) for p in itertools.permutations(range(4))]
    mean = sum(fix_k_count(p, k) for p in elements) / 24
    # S_4 is 2-transitive: one orbit on points and on ordered pairs
    assert mean == 1
    assert burnside_orbit_count([tuple(p) for p in elements], k) == 1


def test_cycle_type_and_order():
    p = P("(1,2,3)(4,5)", 6)
    assert sorted(cycle_type(p)) == [1, 2, 3]
    assert p.order() == 6
    assert p.cycles() == [(1, 2, 3), (4, 5)]
    assert p.cycles(include_fixed=True) == [(1, 2, 3), (4, 5), (6,)]


def test_random_permutations_are_valid():
    rng = random.Random(0)
    from grouprecovery.perm import random_permutation
    for n in range(1, 9):
        p = random_permutation(n, rng)
        assert sorted(p) == list(range(n))
    assert PermutationGroup([P(WE6_GENERATORS[0], 27)], 27).order() == 3
