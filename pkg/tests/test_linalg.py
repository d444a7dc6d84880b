from __future__ import annotations

import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from fillvol.errors import BudgetExceeded, UnsupportedError
from fillvol.linalg import (
    enumerate_field_affine,
    f2_min_weight,
    field_rank,
    integer_row_echelon,
    min_cost_lattice_point,
    solve_field,
    solve_integer,
    spans_integer_lattice,
)
from fillvol.normed_ring import Integers, PrimeField, Rationals

small_ints = st.integers(-3, 3)


def apply(columns, x, add=lambda a, b: a + b, mul=lambda a, b: a * b, zero=0):
    out = {}
    for col, xj in zip(columns, x):
        for k, v in col.items():
            out[k] = add(out.get(k, zero), mul(v, xj))
    return {k: v for k, v in out.items() if v != zero}


def matrices(rows=3, cols=4, elems=small_ints):
    return st.lists(st.lists(elems, min_size=rows, max_size=rows), min_size=1, max_size=cols)


def as_columns(m):
    return [{i: v for i, v in enumerate(col) if v} for col in m]


@given(matrices(), st.lists(small_ints, min_size=4, max_size=4))
def test_solve_integer_against_construction(m, x):
    cols = as_columns(m)
    x = x[: len(cols)]
    rhs = apply(cols, x)
    sol = solve_integer(cols, rhs)
    assert sol is not None
    assert apply(cols, sol.particular) == rhs
    for k in sol.kernel:
        assert apply(cols, k) == {}


def test_solve_integer_detects_no_integer_solution():
    assert solve_integer([{0: 2}], {0: 1}) is None
    assert solve_integer([{0: 1}], {1: 1}) is None


@given(matrices(elems=st.integers(0, 4)), st.lists(st.integers(0, 4), min_size=4, max_size=4))
def test_solve_field_f5(m, x):
    F = PrimeField(5)
    cols = [{i: v % 5 for i, v in enumerate(col) if v % 5} for col in m]
    x = x[: len(cols)]
    rhs = apply(cols, x, F.add, F.mul, 0)
    sol = solve_field(F, cols, rhs)
    assert sol is not None
    assert apply(cols, sol.particular, F.add, F.mul, 0) == rhs
    assert len(sol.kernel) == len(cols) - field_rank(F, cols)


def test_solve_field_rejects_non_field():
    with pytest.raises(UnsupportedError):
        solve_field(Integers(), [{0: 1}], {0: 1})


def test_solve_field_q():
    Q = Rationals()
    sol = solve_field(Q, [{0: Fraction(2), 1: Fraction(1)}], {0: Fraction(1), 1: Fraction(1, 2)})
    assert sol.particular == [Fraction(1, 2)]
    assert solve_field(Q, [{0: Fraction(1)}], {1: Fraction(1)}) is None


def test_min_cost_lattice_point_against_bruteforce():
    # x in Z^3 with x0 - x1 = 2 and x1 - x2 = -1
    cols = [{0: 1}, {0: -1, 1: 1}, {1: -1}]
    rhs = {0: 2, 1: -1}
    sol = solve_integer(cols, rhs)
    w = [Fraction(1), Fraction(2), Fraction(1)]
    x, c = min_cost_lattice_point(sol.particular, sol.kernel, w, 6)
    brute = min(
        (sum(wi * abs(v) for wi, v in zip(w, y)), y)
        for y in itertools.product(range(-6, 7), repeat=3)
        if apply(cols, y) == rhs
    )
    assert c == brute[0]
    assert apply(cols, x) == rhs


def test_min_cost_upper_prunes_everything():
    assert min_cost_lattice_point([3], [], [Fraction(1)], 5, upper=Fraction(2)) is None


def test_min_cost_node_cap():
    with pytest.raises(BudgetExceeded):
        min_cost_lattice_point([0, 0, 0], [[1, 1, 0], [0, 1, 1]], [1, 1, 1], 50, node_cap=5)


@given(st.lists(st.lists(st.integers(0, 1), min_size=5, max_size=5), min_size=1, max_size=3),
       st.lists(st.integers(0, 1), min_size=5, max_size=5))
def test_f2_min_weight_matches_enumeration(kernel, particular):
    F = PrimeField(2)
    w = [Fraction(i + 1) for i in range(5)]

    def cost(x):
        return sum((wi for wi, v in zip(w, x) if v), Fraction(0))

    x1, c1 = f2_min_weight(particular, kernel, w, 1 << 10)
    x2, c2 = enumerate_field_affine(F, particular, kernel, cost, 1 << 10)
    assert c1 == c2 == cost(x1)


def test_enumeration_cap():
    with pytest.raises(BudgetExceeded):
        enumerate_field_affine(PrimeField(3), [0], [[1]] * 5, lambda x: 0, 10)


def test_lattice_helpers():
    assert spans_integer_lattice([[1, 0], [1, 1]], 2)
    assert not spans_integer_lattice([[2, 0], [0, 1]], 2)
    ech = integer_row_echelon([[2, 4], [1, 3]])
    assert len(ech) == 2
