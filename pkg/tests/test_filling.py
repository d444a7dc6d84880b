from __future__ import annotations

import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from fillvol.chain_complex import Cell, builtin_complex, commutator_cycle
from fillvol.errors import BudgetExceeded, DegreeError, DomainError, NoFillingExists
from fillvol.filling import (
    EXACT,
    STATUS_EXACT,
    STATUS_PARTIAL,
    Budget,
    FillingFunctionTable,
    FillingProblem,
    TableEntry,
    bounded_filling,
    enumerate_cycles,
    fill_bruteforce,
    fill_by_thickening,
    filling_function_table,
    filling_volume,
    fv,
    polynomial_equivalence_check,
    preccurlyeq_witness,
    weighted_filling_table,
    weighted_sup_table,
)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_commutator_over_z(z2, n):
    c = commutator_cycle(n, z2)
    res = filling_volume(FillingProblem(z2, c))
    assert res.exact and res.value == n * n
    assert z2.boundary(res.filling) == c
    oracle = fill_bruteforce(FillingProblem(z2, c, budget=Budget(box=n * n, window_radius=n * n - 1)))
    assert oracle.exact and oracle.value == n * n


@pytest.mark.parametrize("n", [1, 2, 3])
def test_commutator_over_q(z2q, n):
    c = commutator_cycle(n, z2q, Fraction(1, n))
    assert z2q.norm(c) == 4
    res = filling_volume(FillingProblem(z2q, c))
    assert res.exact and res.value == n
    assert res.trace["denominator"] == n


def test_zero_and_invalid_inputs(z2, z7):
    assert fv(z2, z2.zero(1)) == 0
    not_cycle = z2.basis_chain(z2.cell(1, "e_x"))
    with pytest.raises(DomainError):
        FillingProblem(z2, not_cycle)
    with pytest.raises(DegreeError):
        FillingProblem(z2, z2.basis_chain(z2.cell(2, "f")))


def test_no_filling_exists_for_generator_of_h0():
    cx = builtin_complex("cyclic", k=7, n=2)
    with pytest.raises(NoFillingExists):
        filling_volume(FillingProblem(cx, cx.basis_chain(cx.cell(0, "b0"))))
    with pytest.raises(NoFillingExists):
        fill_bruteforce(FillingProblem(builtin_complex("cyclic", k=3, n=2, ring="F2"),
                                       builtin_complex("cyclic", k=3, n=2, ring="F2").basis_chain(Cell(0, 0, 0))))


def test_norm_element_fills_with_one_cell(z7):
    c = z7.boundary(z7.basis_chain(z7.cell(2, "b2", 3)))
    res = filling_volume(FillingProblem(z7, c))
    assert res.value == 1 and res.exact


def test_thickening_upper_bounds_exact(z7):
    for g in range(7):
        c = z7.sub(z7.basis_chain(z7.cell(0, "b0", g)), z7.basis_chain(z7.cell(0, "b0", 0)))
        th = fill_by_thickening(FillingProblem(z7, c))
        ex = filling_volume(FillingProblem(z7, c))
        assert z7.boundary(th.filling) == c
        assert th.value >= ex.value == min(g, 7 - g)


z2_faces = st.lists(st.tuples(st.tuples(st.integers(-2, 2), st.integers(-2, 2)), st.integers(-2, 2)),
                    max_size=4)


@given(z2_faces)
def test_z2_boundary_has_unique_filling(terms):
    # d_2 is injective, so FV(d b) = ||b||
    cx = builtin_complex("z2")
    b = cx.chain(2, [(Cell(2, 0, g), a) for g, a in terms])
    c = cx.boundary(b)
    res = filling_volume(FillingProblem(cx, c))
    assert res.exact and res.filling == b
    w = filling_volume(FillingProblem(cx, c, weighted=True))
    assert w.value == cx.weighted_norm(b)


@given(st.sets(st.integers(0, 6), min_size=1, max_size=7), st.integers(0, 6))
def test_f2_z7_exact_matches_oracle_and_translation(cells, g):
    cx = builtin_complex("cyclic", k=7, n=2, ring="F2")
    b = cx.chain(1, [(Cell(1, 0, h), 1) for h in cells])
    c = cx.boundary(b)
    res = filling_volume(FillingProblem(cx, c))
    assert res.exact
    assert res.value == fill_bruteforce(FillingProblem(cx, c)).value
    assert fv(cx, cx.translate(g, c)) == res.value
    assert res.value <= len(cells)


@given(st.lists(st.integers(0, 3), min_size=4, max_size=4))
def test_composite_ring_z4(coeffs):
    cx = builtin_complex("cyclic", k=4, n=2, ring="Z/4")
    b = cx.chain(1, [(Cell(1, 0, h), a) for h, a in enumerate(coeffs)])
    c = cx.boundary(b)
    res = filling_volume(FillingProblem(cx, c))
    assert res.exact
    assert res.value == fill_bruteforce(FillingProblem(cx, c)).value
    assert res.value <= sum(1 for a in coeffs if a)


def test_subadditivity(z2):
    a = commutator_cycle(1, z2)
    b = z2.translate((5, 0), commutator_cycle(2, z2))
    assert fv(z2, z2.add(a, b)) <= fv(z2, a) + fv(z2, b)


def test_weighted_dominates_plain(z2):
    c = z2.translate((2, -1), commutator_cycle(2, z2))
    assert fv(z2, c, weighted=True) >= fv(z2, c)


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_orbit_table_matches_full_table(k):
    cx = builtin_complex("cyclic", k=k, n=2, ring="F2")
    a = filling_function_table(cx, 2, 6, "orbit")
    b = filling_function_table(cx, 2, 6, "full")
    assert a.values() == b.values()
    assert all(e.status == STATUS_EXACT for e in a.entries + b.entries)
    assert a.values()[k] == 1 and a.values()[k - 1] == 0


def test_composite_ring_table_refines():
    cx = builtin_complex("cyclic", k=3, n=2, ring="Z/4")
    a = filling_function_table(cx, 2, 4, "orbit")
    b = filling_function_table(cx, 2, 4, "full")
    assert a.values() == b.values()


def test_z2_table_small():
    cx = builtin_complex("z2")
    t = filling_function_table(cx, 2, 6)
    assert [int(v) for v in t.values()] == [0, 0, 0, 0, 1, 1, 2]
    assert t.is_monotone()


def test_parallel_table_is_identical(monkeypatch):
    cx = builtin_complex("cyclic", k=5, n=2, ring="F3")
    serial = filling_function_table(cx, 2, 6, workers=1)
    monkeypatch.setenv("FILLVOL_THREADS", "2")
    parallel = filling_function_table(cx, 2, 6)
    assert serial.to_csv() == parallel.to_csv()


def test_table_budget_gives_partial():
    cx = builtin_complex("cyclic", k=3, n=2, ring="F2")
    t = filling_function_table(cx, 2, 6, budget=Budget(node_cap=1))
    assert t.entries[-1].status == STATUS_PARTIAL
    assert "partial" in t.to_csv()


def test_table_csv_and_lookup():
    t = FillingFunctionTable(2, False, [TableEntry(l, Fraction(l, 2), STATUS_EXACT) for l in range(4)])
    assert t.to_csv().splitlines() == ["l,value,status", "0,0,exact", "1,1/2,exact", "2,1,exact", "3,3/2,exact"]
    assert t.lookup(Fraction(5, 2)) == 1
    assert t.lookup(9) is None
    assert t.lower(9) == Fraction(3, 2)


def test_table_argument_errors(z7):
    with pytest.raises(DegreeError):
        filling_function_table(z7, 1, 3)
    with pytest.raises(DomainError):
        filling_function_table(z7, 2, -1)
    with pytest.raises(DomainError):
        filling_function_table(z7, 2, 2, "bogus")


def test_weighted_table_saturates():
    cx = builtin_complex("cyclic", k=3, n=2, ring="F2")
    w = weighted_sup_table(cx, 2)
    assert w.info["sup"] == 1
    assert w.lookup(10**6) == 1
    plain = filling_function_table(cx, 2, 6)
    for x in range(7):
        assert w.lower(x) <= plain.value(x) * (1 + 3)


def test_weighted_table_z2():
    cx = builtin_complex("z2")
    w = weighted_filling_table(cx, 2, 8)
    # the unit square at the identity has weighted norm 1+1+2+2 = 6
    assert w.value(5) == 0 and w.value(6) == 1


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_polynomial_equivalence_samples(k):
    cx = builtin_complex("cyclic", k=k, n=2, ring="F2")
    rows = polynomial_equivalence_check(cx, filling_function_table(cx, 2, 6), weighted_sup_table(cx, 2))
    assert all(r.ok_i and r.ok_ii for r in rows)


def test_preccurlyeq_witness():
    g = {v: v * v for v in range(11)}
    assert preccurlyeq_witness(g, g, 3, 3) == (1, 0)
    f = {v: 2 * v * v for v in range(11)}
    assert preccurlyeq_witness(f, g, 3, 0) == (2, 0)
    lin = {v: v for v in range(11)}
    assert preccurlyeq_witness(g, lin, 2, 2) is None
    with pytest.raises(DomainError):
        preccurlyeq_witness({50: 1}, {0: 1}, 2, 2)
    with pytest.raises(DomainError):
        preccurlyeq_witness({}, g, 2, 2)


def test_bounded_filling_components(z2):
    a = commutator_cycle(1, z2)
    b = z2.translate((6, 3), commutator_cycle(2, z2))
    c = z2.add(a, b)
    bf = bounded_filling(z2, c)
    assert z2.boundary(bf.filling) == c
    assert bf.components == 2
    # translated to the identity: weights 1 and 1 + 2 + 2 + 3
    assert sorted(bf.component_values) == [1, 8]
    assert bf.checked == "observed"
    assert z2.norm(bf.filling) <= bf.bound_plain


def test_bounded_filling_with_table():
    cx = builtin_complex("cyclic", k=5, n=2, ring="F2")
    w = weighted_sup_table(cx, 2)
    c = cx.boundary(cx.basis_chain(cx.cell(2, "b2", 2)))
    bf = bounded_filling(cx, c, w)
    assert bf.checked == "table"
    assert cx.boundary(bf.filling) == c


def test_enumerate_cycles_counts():
    cx = builtin_complex("cyclic", k=3, n=2, ring="F2")
    cycles = list(enumerate_cycles(cx, cx.all_cells(1), Fraction(3), False, [1], False, 10**5))
    assert len(cycles) == 2


def test_oracle_budget(z2):
    with pytest.raises(BudgetExceeded):
        fill_bruteforce(FillingProblem(z2, commutator_cycle(3, z2),
                                       budget=Budget(box=9, window_radius=8, node_cap=10)))
    with pytest.raises(DomainError):
        fill_bruteforce(FillingProblem(z2, commutator_cycle(1, z2)))


def test_oracle_uncertified_small_box(z2):
    res = fill_bruteforce(FillingProblem(z2, commutator_cycle(2, z2), budget=Budget(box=1, window_radius=3)))
    assert res.status != EXACT and res.value == 4


def test_discrete_norm_on_z_gives_upper_bound_only():
    from fillvol.chain_complex import z2_presentation_complex
    from fillvol.normed_ring import DiscreteNorm, Integers, NormedRing

    cx = z2_presentation_complex(NormedRing(Integers(), DiscreteNorm()))
    res = filling_volume(FillingProblem(cx, commutator_cycle(2, cx)))
    assert not res.exact and res.value == 4


def test_all_small_z_cycles_on_z3_match_oracle():
    cx = builtin_complex("cyclic", k=3, n=2)
    for coeffs in itertools.product(range(-1, 2), repeat=3):
        b = cx.chain(2, [(Cell(2, 0, h), a) for h, a in enumerate(coeffs)])
        c = cx.boundary(b)
        res = filling_volume(FillingProblem(cx, c))
        box = max(1, int(res.value))
        oracle = fill_bruteforce(FillingProblem(cx, c, budget=Budget(box=box)))
        assert res.value == oracle.value
