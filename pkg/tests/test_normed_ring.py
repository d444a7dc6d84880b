from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from fillvol.errors import DomainError, SchemaError, UnsupportedError
from fillvol.normed_ring import (
    AbsoluteNorm,
    DiscreteNorm,
    Integers,
    ModularIntegers,
    NormedRing,
    PrimeField,
    Rationals,
    ScaledNorm,
    SymmetrizedNorm,
    TableNorm,
    TableRing,
    check_norm_axioms,
    norm_from_spec,
    norm_value,
    parse_ring_shorthand,
    rescale_to_one_separated,
    ring_ball,
    ring_from_spec,
    separation,
    symmetrize,
)

FINITE = [ModularIntegers(m) for m in range(2, 13)] + [PrimeField(p) for p in (2, 3, 5, 7)]


@pytest.mark.parametrize("ring", FINITE, ids=str)
def test_discrete_norm_axioms_exhaustive(ring):
    assert check_norm_axioms(ring, DiscreteNorm()) == []
    assert check_norm_axioms(ring, symmetrize(DiscreteNorm())) == []


def test_modular_arithmetic():
    R = ModularIntegers(6)
    assert R.add(4, 5) == 3
    assert R.mul(4, 5) == 2
    assert R.neg(1) == 5
    assert R.coerce(-1) == 5
    assert not R.is_field
    assert PrimeField(5).inv(2) == 3


def test_prime_field_rejects_composite():
    with pytest.raises(DomainError):
        PrimeField(6)


def test_absolute_norm_needs_z_or_q():
    with pytest.raises(DomainError):
        NormedRing(ModularIntegers(5), AbsoluteNorm())


def test_scaled_norm_factor_at_least_one():
    with pytest.raises(DomainError):
        ScaledNorm(AbsoluteNorm(), Fraction(1, 2))
    assert norm_value(Integers(), ScaledNorm(AbsoluteNorm(), 3), -2) == 6


def test_table_norm_on_z4_with_asymmetric_values():
    # |1| = 1, |2| = 1, |3| = 2 on Z/4 is a valid norm that is not symmetric
    R = ModularIntegers(4)
    N = TableNorm((0, 1, 1, 2))
    assert check_norm_axioms(R, N) == []
    nr = NormedRing(R, N)
    assert nr.abs(3) != nr.abs(R.neg(3))
    assert nr.separation == 1


def test_invalid_table_norm_rejected():
    with pytest.raises(DomainError):
        NormedRing(ModularIntegers(3), TableNorm((0, 1, 5)))


@pytest.mark.parametrize("ring", FINITE, ids=str)
def test_symmetrize_sandwich(ring):
    for base in (DiscreteNorm(), ScaledNorm(DiscreteNorm(), 2)):
        sym = symmetrize(base)
        m1 = norm_value(ring, base, ring.neg(ring.one))
        for x in ring.elements():
            v = norm_value(ring, base, x)
            assert v <= norm_value(ring, sym, x) <= (1 + m1) * v


@given(st.integers(-10**6, 10**6), st.integers(-10**6, 10**6))
def test_absolute_norm_on_z(x, y):
    assert check_norm_axioms(Integers(), AbsoluteNorm(), [(x, y)]) == []


@given(st.fractions(max_denominator=1000), st.fractions(max_denominator=1000))
def test_absolute_norm_on_q(x, y):
    assert check_norm_axioms(Rationals(), AbsoluteNorm(), [(x, y)]) == []
    assert check_norm_axioms(Rationals(), symmetrize(AbsoluteNorm()), [(x, y)]) == []


def test_separation_values():
    assert separation(Integers(), AbsoluteNorm()) == 1
    assert separation(Rationals(), AbsoluteNorm()) is None
    assert separation(PrimeField(3), ScaledNorm(DiscreteNorm(), 2)) == 2
    assert separation(Integers(), DiscreteNorm()) == 1


def test_rescale_to_one_separated():
    R = ModularIntegers(4)
    N = TableNorm((0, 1, Fraction(1, 2), 1))
    assert check_norm_axioms(R, N) == []
    M = rescale_to_one_separated(R, N)
    assert separation(R, M) == 1
    with pytest.raises(UnsupportedError):
        rescale_to_one_separated(Rationals(), AbsoluteNorm())


def test_ring_ball():
    assert ring_ball(Integers(), AbsoluteNorm(), 2) == (-2, -1, 0, 1, 2)
    assert ring_ball(PrimeField(3), DiscreteNorm(), 1) == (0, 1, 2)
    assert ring_ball(Integers(), DiscreteNorm(), Fraction(1, 2)) == (0,)
    with pytest.raises(UnsupportedError):
        ring_ball(Rationals(), AbsoluteNorm(), 1)
    with pytest.raises(UnsupportedError):
        ring_ball(Integers(), DiscreteNorm(), 1)


@pytest.mark.parametrize("text", ["Z", "Q", "F2", "F5", "Z/4"])
def test_spec_round_trip(text):
    nr = parse_ring_shorthand(text)
    spec = nr.to_spec()
    assert ring_from_spec(spec["ring"]) == nr.ring
    assert norm_from_spec(spec["norm"]) == nr.norm


def test_bad_specs():
    with pytest.raises(SchemaError):
        ring_from_spec({"kind": "octonions"})
    with pytest.raises(SchemaError):
        norm_from_spec({"nokind": 1})
    with pytest.raises(DomainError):
        parse_ring_shorthand("R")


def test_table_ring_z2xz2():
    add = [[a ^ b for b in range(4)] for a in range(4)]
    mul = [[a & b for b in range(4)] for a in range(4)]
    R = TableRing(add, mul, zero_index=0, one_index=3)
    assert not R.is_field
    assert check_norm_axioms(R, DiscreteNorm()) == []


def test_random_pairs_z_and_q():
    rng = random.Random(7)
    for R in (Integers(), Rationals()):
        from fillvol.normed_ring import random_elements
        xs = random_elements(R, 2000, rng)
        assert check_norm_axioms(R, AbsoluteNorm(), list(zip(xs[::2], xs[1::2]))) == []


def test_symmetrized_is_symmetric():
    R = ModularIntegers(4)
    sym = SymmetrizedNorm(TableNorm((0, 1, 1, 2)))
    for x in R.elements():
        assert norm_value(R, sym, x) == norm_value(R, sym, R.neg(x))


def test_axiom_violation_reported():
    bad = TableNorm((0, 1, 3))
    problems = check_norm_axioms(ModularIntegers(3), bad)
    assert any("triangle" in p for p in problems)


def test_every_small_table_norm_checked():
    # all {0,1,2}-valued functions on Z/3 with |0| = 0: axioms decide validity
    R = ModularIntegers(3)
    valid = 0
    for a, b in itertools.product(range(3), repeat=2):
        if check_norm_axioms(R, TableNorm((0, a, b))) == []:
            valid += 1
    assert valid >= 1
