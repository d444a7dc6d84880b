from __future__ import annotations

import random
import warnings

import pytest
from hypothesis import given, strategies as st

from fillvol.chain_complex import Cell, builtin_complex
from fillvol.errors import DomainError
from fillvol.support_geometry import (
    K,
    build_gr,
    check_boundary_estimate,
    check_connected_chain_estimate,
    check_edge_estimate,
    connected_components,
    constants,
    gr_neighbors,
    is_connected_chain,
    local_finiteness_bound,
    neighbor_cells_above,
    neighbor_cells_scan,
)


@pytest.mark.parametrize("k", [3, 4, 5, 7])
def test_figure_one_graphs(k):
    cx = builtin_complex("cyclic", k=k, n=4)
    assert build_gr(cx, cx.all_cells(0)).classify() == "edgeless"
    for i in (1, 3):
        g = build_gr(cx, cx.all_cells(i))
        assert g.edge_count == k and g.is_regular() == 2 and g.is_connected()
        # the 3-cycle is also K_3, which the classifier reports first
        assert g.classify() == ("complete" if k == 3 else "cycle")
    for i in (2, 4):
        g = build_gr(cx, cx.all_cells(i))
        assert g.edge_count == k * (k - 1) // 2
        assert g.classify() == "complete"


def test_constants_z7(z7):
    assert [K(z7, i) for i in range(4)] == [0, 1, 3, 1]
    assert constants(z7, 2).A == frozenset(range(7))


def test_constants_z2(z2):
    assert K(z2, 1) == 1
    assert K(z2, 2) == 1


@pytest.mark.parametrize("name,params", [("cyclic", {"k": 7, "n": 3}), ("z2", {}), ("tripod", {}),
                                         ("z6-two-generator", {})])
def test_neighbor_cells_match_scan(name, params):
    cx = builtin_complex(name, **params)
    for i in range(cx.top_degree):
        cells = cx.all_cells(i) if cx.group.is_finite else cx.cells_within(i, 2)
        for u in cells:
            assert neighbor_cells_above(cx, u) == neighbor_cells_scan(cx, u)


def test_top_degree_warning(z7, z2):
    with pytest.warns(UserWarning):
        assert neighbor_cells_above(z7, z7.cell(3, "b3")) == []
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert neighbor_cells_above(z2, z2.cell(2, "f")) == []


def test_lemma_estimates_on_z7(z7):
    for i in range(1, z7.top_degree + 1):
        cells = z7.all_cells(i)
        for x in cells:
            assert check_boundary_estimate(z7, x) == []
            for y in gr_neighbors(z7, x):
                assert check_edge_estimate(z7, x, y) == []


def test_connected_chain_estimate_z7(z7):
    for i in range(1, 3):
        chain = z7.chain(i, [(c, 1) for c in z7.all_cells(i)])
        assert is_connected_chain(z7, chain)
        assert check_connected_chain_estimate(z7, chain) == []


def random_connected_chain(cx, degree, rng, radius, size):
    start = rng.choice(cx.cells_within(degree, radius))
    cells = {start}
    frontier = [start]
    while len(cells) < size and frontier:
        u = rng.choice(frontier)
        options = [v for v in gr_neighbors(cx, u) if v not in cells
                   and cx.group.word_length(v.gamma) <= radius]
        if not options:
            frontier.remove(u)
            continue
        v = rng.choice(options)
        cells.add(v)
        frontier.append(v)
    return cx.chain(degree, [(c, rng.choice([-2, -1, 1, 2])) for c in cells])


def test_random_connected_chains_z2(z2):
    rng = random.Random(2024)
    for _ in range(300):
        deg = rng.choice([1, 2])
        c = random_connected_chain(z2, deg, rng, 6, rng.randint(1, 8))
        assert is_connected_chain(z2, c)
        assert check_connected_chain_estimate(z2, c) == []
        for x in c.terms:
            assert check_boundary_estimate(z2, x) == []


def test_components(z2):
    a = z2.cell(2, "f", (0, 0))
    b = z2.cell(2, "f", (5, 5))
    c = z2.chain(2, [(a, 1), (b, 1)])
    comps = connected_components(z2, c)
    assert [len(x) for x in comps] == [1, 1]
    assert not is_connected_chain(z2, c)


def test_graph_rejects_mixed_degrees(z2):
    with pytest.raises(DomainError):
        build_gr(z2, [z2.cell(1, "e_x"), z2.cell(2, "f")])


@given(st.integers(-4, 4), st.integers(-4, 4))
def test_gr_is_symmetric_and_locally_finite(x, y):
    cx = builtin_complex("z2")
    bound = local_finiteness_bound(cx, 2)
    u = Cell(2, 0, (x, y))
    nbrs = gr_neighbors(cx, u)
    assert len(nbrs) <= bound
    for v in nbrs:
        assert u in gr_neighbors(cx, v)
        assert check_edge_estimate(cx, u, v) == []
